#ifndef DIPOA_SMOOTH_HPP_
#define DIPOA_SMOOTH_HPP_

#include <vector>

#include "dipoa/problem.hpp"

namespace dipoa {

// Twice-differentiable-or-not objective seen by the minimizers. Evaluate
// returns the value, fills grad, and fills hess when it is non-null and the
// Hessian is known (return flag via *has_hess).
class Objective {
 public:
  virtual ~Objective() = default;
  virtual double Evaluate(const Vector& x, Vector* grad, Matrix* hess, bool* has_hess) const = 0;
};

struct MinimizerOptions {
  double grad_tol = 1e-8;
  double stall_grad_tol = 1e-6;  // accepted when the line search stalls
  int max_iter = 500;
};

struct MinimizerResult {
  Vector x;
  double value = kInf;
  double grad_norm = kInf;
  int iterations = 0;
  bool converged = false;
};

// Newton with exact Hessians when the objective supplies them, dense BFGS
// otherwise; Armijo backtracking in both cases.
MinimizerResult Minimize(const Objective& objective, const Vector& x0,
                         const MinimizerOptions& options = {});

// min  sum_t f_t(x) + (w/2)||x - center||^2
// s.t. D x <= d, A x = b, g_h(x) <= 0.
// Every pointer must outlive the solve.
struct ProxProblem {
  int n = 0;
  std::vector<const SmoothFunction*> terms;
  double prox_weight = 0.0;
  Vector prox_center;
  const Polytope* polytope = nullptr;
  std::vector<const SmoothFunction*> constraints;
};

// Multipliers carried between successive solves of similar problems.
struct MultiplierState {
  Vector inequality;
  Vector equality;
  Vector nonlinear;
  double penalty = 0.0;
};

struct ConstrainedOptions {
  MinimizerOptions inner;
  double feas_tol = 1e-9;
  double penalty0 = 10.0;
  double penalty_max = 1e10;
  int max_outer = 60;
};

struct ConstrainedResult {
  Vector x;
  double objective = kInf;  // without the proximal term
  double max_violation = kInf;
  int outer_iterations = 0;
  bool converged = false;
};

// Augmented Lagrangian (Powell-Hestenes-Rockafellar) over Minimize. Without
// constraints this is a single unconstrained solve.
ConstrainedResult SolveProx(const ProxProblem& problem, const Vector& x0, MultiplierState* state,
                            const ConstrainedOptions& options = {});

}  // namespace dipoa

#endif  // DIPOA_SMOOTH_HPP_
