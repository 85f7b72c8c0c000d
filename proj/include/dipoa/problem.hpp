#ifndef DIPOA_PROBLEM_HPP_
#define DIPOA_PROBLEM_HPP_

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dipoa/types.hpp"

namespace dipoa {

// A convex, continuously differentiable function R^n -> R accessed only
// through values and gradients.
class SmoothFunction {
 public:
  virtual ~SmoothFunction() = default;

  virtual int dimension() const = 0;
  virtual double Value(const Vector& x) const = 0;
  virtual Vector Gradient(const Vector& x) const = 0;

  // Fused evaluation; concrete functions override when it saves work.
  virtual double ValueAndGradient(const Vector& x, Vector* grad) const {
    *grad = Gradient(x);
    return Value(x);
  }

  // Writes the Hessian when the function knows it; returns false otherwise and
  // callers fall back to quasi-Newton updates.
  virtual bool Hessian(const Vector& /*x*/, Matrix* /*hess*/) const { return false; }
};

using FunctionPtr = std::shared_ptr<const SmoothFunction>;

// f(x) = 0.5 x'Qx + q'x + d with Q symmetric positive semidefinite.
class QuadraticFunction final : public SmoothFunction {
 public:
  QuadraticFunction(Matrix Q, Vector q, double d);

  int dimension() const override { return static_cast<int>(q_.size()); }
  double Value(const Vector& x) const override;
  Vector Gradient(const Vector& x) const override;
  double ValueAndGradient(const Vector& x, Vector* grad) const override;
  bool Hessian(const Vector& x, Matrix* hess) const override;

  const Matrix& Q() const { return Q_; }
  const Vector& q() const { return q_; }
  double d() const { return d_; }

  // Smallest eigenvalue of Q, clamped at zero.
  double MinEigenvalue() const;

 private:
  Matrix Q_;
  Vector q_;
  double d_;
};

// Ridge-regularized logistic loss
//   f(theta) = sum_l log(1 + exp(-label_l * x_l' theta)) + lambda/2 ||theta||^2
// with labels in {-1, +1}. Strongly convex with modulus lambda.
class LogisticFunction final : public SmoothFunction {
 public:
  LogisticFunction(Matrix X, Vector labels, double lambda);

  int dimension() const override { return static_cast<int>(X_.cols()); }
  double Value(const Vector& theta) const override;
  Vector Gradient(const Vector& theta) const override;
  double ValueAndGradient(const Vector& theta, Vector* grad) const override;
  bool Hessian(const Vector& theta, Matrix* hess) const override;

  const Matrix& X() const { return X_; }
  const Vector& labels() const { return labels_; }
  double lambda() const { return lambda_; }

 private:
  Matrix X_;
  Vector labels_;
  double lambda_;
};

// Black-box oracle built from callables.
class CallableFunction final : public SmoothFunction {
 public:
  using ValueFn = std::function<double(const Vector&)>;
  using GradientFn = std::function<Vector(const Vector&)>;

  CallableFunction(int dimension, ValueFn value, GradientFn gradient)
      : dimension_(dimension), value_(std::move(value)), gradient_(std::move(gradient)) {}

  int dimension() const override { return dimension_; }
  double Value(const Vector& x) const override { return value_(x); }
  Vector Gradient(const Vector& x) const override { return gradient_(x); }

 private:
  int dimension_;
  ValueFn value_;
  GradientFn gradient_;
};

struct ObjectiveOracle {
  FunctionPtr function;
  // m_i >= 0 such that f_i(x) >= f_i(xb) + grad'(x - xb) + m_i/2 ||x - xb||^2.
  // Zero disables second-order cuts for this node.
  double strong_convexity = 0.0;
};

struct ConstraintOracle {
  FunctionPtr function;
};

// Omega = { x : D x <= d, A x = b }. Any block may have zero rows.
struct Polytope {
  Matrix D;
  Vector d;
  Matrix A;
  Vector b;

  static Polytope Free(int n);
  static Polytope Box(const Vector& lower, const Vector& upper);

  int num_inequalities() const { return static_cast<int>(D.rows()); }
  int num_equalities() const { return static_cast<int>(A.rows()); }
  bool empty() const { return D.rows() == 0 && A.rows() == 0; }
  bool Contains(const Vector& x, double tol = 1e-9) const;
};

// Sparse convex program:
//   min sum_i f_i(x)  s.t.  g_h(x) <= 0,  x in Omega,  ||x||_0 <= kappa.
// Immutable once built; safe to share across workers.
struct ScpInstance {
  int n = 0;
  int kappa = 1;
  std::vector<ObjectiveOracle> objectives;
  std::vector<ConstraintOracle> constraints;
  Polytope polytope;
  std::optional<Vector> big_m;

  int num_nodes() const { return static_cast<int>(objectives.size()); }
  int num_constraints() const { return static_cast<int>(constraints.size()); }

  double TotalObjective(const Vector& x) const;
};

struct ValidationFinding {
  std::string code;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationFinding> findings;

  bool ok() const { return findings.empty(); }
  bool Has(const std::string& code) const;
};

// Structural and oracle consistency checks. Never throws; problems are
// reported as findings. The gradient check compares against central
// differences (step 1e-6) at 10 random points with tolerance 1e-5.
ValidationReport ValidateInstance(const ScpInstance& inst, std::uint64_t seed = 0);

// M_c = max over Omega of |x_c| (+1e-6), from 2n linear programs.
// Throws UnboundedPolytope or EmptyPolytope.
Vector ComputeBigM(const Polytope& poly);

// The instance's big-M if present, otherwise ComputeBigM(polytope).
Vector ResolveBigM(const ScpInstance& inst);

// Central finite-difference gradient.
Vector FiniteDifferenceGradient(const SmoothFunction& f, const Vector& x, double step = 1e-6);

}  // namespace dipoa

#endif  // DIPOA_PROBLEM_HPP_
