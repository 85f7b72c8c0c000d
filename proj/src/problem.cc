#include "dipoa/problem.hpp"

#include <algorithm>
#include <sstream>

#include "dipoa/lp.hpp"

namespace dipoa {

QuadraticFunction::QuadraticFunction(Matrix Q, Vector q, double d)
    : Q_(std::move(Q)), q_(std::move(q)), d_(d) {
  if (Q_.rows() != Q_.cols() || Q_.rows() != q_.size()) {
    throw std::invalid_argument("quadratic function: Q must be square and match q");
  }
  Q_ = 0.5 * (Q_ + Q_.transpose()).eval();
}

double QuadraticFunction::Value(const Vector& x) const {
  return 0.5 * x.dot(Q_ * x) + q_.dot(x) + d_;
}

Vector QuadraticFunction::Gradient(const Vector& x) const { return Q_ * x + q_; }

double QuadraticFunction::ValueAndGradient(const Vector& x, Vector* grad) const {
  Vector Qx = Q_ * x;
  *grad = Qx + q_;
  return 0.5 * x.dot(Qx) + q_.dot(x) + d_;
}

bool QuadraticFunction::Hessian(const Vector& /*x*/, Matrix* hess) const {
  *hess = Q_;
  return true;
}

double QuadraticFunction::MinEigenvalue() const {
  if (Q_.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(Q_, Eigen::EigenvaluesOnly);
  return std::max(0.0, eig.eigenvalues()[0]);
}

LogisticFunction::LogisticFunction(Matrix X, Vector labels, double lambda)
    : X_(std::move(X)), labels_(std::move(labels)), lambda_(lambda) {
  if (X_.rows() != labels_.size()) {
    throw std::invalid_argument("logistic function: one label per row required");
  }
  if (lambda_ < 0) throw std::invalid_argument("logistic function: lambda must be >= 0");
}

namespace {

// log(1 + exp(t)) without overflow.
double Softplus(double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

double Sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

double LogisticFunction::Value(const Vector& theta) const {
  Vector margins = X_ * theta;
  double v = 0.0;
  for (Eigen::Index l = 0; l < margins.size(); ++l) v += Softplus(-labels_[l] * margins[l]);
  return v + 0.5 * lambda_ * theta.squaredNorm();
}

Vector LogisticFunction::Gradient(const Vector& theta) const {
  Vector g;
  ValueAndGradient(theta, &g);
  return g;
}

double LogisticFunction::ValueAndGradient(const Vector& theta, Vector* grad) const {
  Vector margins = X_ * theta;
  Vector weights(margins.size());
  double v = 0.0;
  for (Eigen::Index l = 0; l < margins.size(); ++l) {
    const double t = -labels_[l] * margins[l];
    v += Softplus(t);
    weights[l] = -labels_[l] * Sigmoid(t);
  }
  *grad = X_.transpose() * weights + lambda_ * theta;
  return v + 0.5 * lambda_ * theta.squaredNorm();
}

bool LogisticFunction::Hessian(const Vector& theta, Matrix* hess) const {
  Vector margins = X_ * theta;
  Vector w(margins.size());
  for (Eigen::Index l = 0; l < margins.size(); ++l) {
    const double s = Sigmoid(-labels_[l] * margins[l]);
    w[l] = s * (1.0 - s);
  }
  *hess = X_.transpose() * w.asDiagonal() * X_;
  hess->diagonal().array() += lambda_;
  return true;
}

Polytope Polytope::Free(int n) {
  Polytope p;
  p.D.resize(0, n);
  p.d.resize(0);
  p.A.resize(0, n);
  p.b.resize(0);
  return p;
}

Polytope Polytope::Box(const Vector& lower, const Vector& upper) {
  const int n = static_cast<int>(lower.size());
  Polytope p = Free(n);
  p.D = Matrix::Zero(2 * n, n);
  p.d = Vector::Zero(2 * n);
  for (int c = 0; c < n; ++c) {
    p.D(2 * c, c) = 1.0;
    p.d[2 * c] = upper[c];
    p.D(2 * c + 1, c) = -1.0;
    p.d[2 * c + 1] = -lower[c];
  }
  return p;
}

bool Polytope::Contains(const Vector& x, double tol) const {
  if (num_inequalities() > 0 && ((D * x - d).array() > tol).any()) return false;
  if (num_equalities() > 0 && ((A * x - b).array().abs() > tol).any()) return false;
  return true;
}

double ScpInstance::TotalObjective(const Vector& x) const {
  double v = 0.0;
  for (const auto& obj : objectives) v += obj.function->Value(x);
  return v;
}

bool ValidationReport::Has(const std::string& code) const {
  return std::any_of(findings.begin(), findings.end(),
                     [&](const ValidationFinding& f) { return f.code == code; });
}

Vector FiniteDifferenceGradient(const SmoothFunction& f, const Vector& x, double step) {
  Vector g(x.size());
  Vector xp = x;
  for (Eigen::Index c = 0; c < x.size(); ++c) {
    const double orig = xp[c];
    xp[c] = orig + step;
    const double fp = f.Value(xp);
    xp[c] = orig - step;
    const double fm = f.Value(xp);
    xp[c] = orig;
    g[c] = (fp - fm) / (2.0 * step);
  }
  return g;
}

namespace {

void Report(ValidationReport* report, std::string code, std::string message) {
  report->findings.push_back({std::move(code), std::move(message)});
}

bool CheckGradient(const SmoothFunction& f, int n, Rng* rng, std::string* detail) {
  for (int trial = 0; trial < 10; ++trial) {
    Vector x(n);
    for (int c = 0; c < n; ++c) x[c] = rng->Uniform(-1.0, 1.0);
    Vector g = f.Gradient(x);
    Vector fd = FiniteDifferenceGradient(f, x);
    const double err = (g - fd).lpNorm<Eigen::Infinity>();
    if (!(err <= 1e-5 * std::max(1.0, fd.lpNorm<Eigen::Infinity>()))) {
      std::ostringstream os;
      os << "max gradient error " << err << " at trial " << trial;
      *detail = os.str();
      return false;
    }
  }
  return true;
}

}  // namespace

ValidationReport ValidateInstance(const ScpInstance& inst, std::uint64_t seed) {
  ValidationReport report;
  const int n = inst.n;
  if (n < 1) Report(&report, "dimension", "n must be at least 1");
  if (inst.objectives.empty()) Report(&report, "no_nodes", "objective list is empty");
  if (inst.kappa < 1 || inst.kappa > n) {
    Report(&report, "kappa_range", "cardinality bound must lie in [1, n]");
  } else if (inst.kappa == n) {
    Report(&report, "cardinality_not_strict", "cardinality bound not strict");
  }

  const Polytope& P = inst.polytope;
  if ((P.D.rows() > 0 && P.D.cols() != n) || P.D.rows() != P.d.size() ||
      (P.A.rows() > 0 && P.A.cols() != n) || P.A.rows() != P.b.size()) {
    Report(&report, "dimension", "polytope blocks do not match n");
  }
  if (inst.big_m) {
    if (inst.big_m->size() != n) {
      Report(&report, "dimension", "big_m length differs from n");
    } else if (!(inst.big_m->array() > 0).all()) {
      Report(&report, "big_m", "big_m entries must be positive");
    }
  }
  if (n < 1) return report;

  Rng rng(seed);
  for (int i = 0; i < inst.num_nodes(); ++i) {
    const auto& obj = inst.objectives[i];
    if (!obj.function || obj.function->dimension() != n) {
      Report(&report, "dimension", "objective " + std::to_string(i) + " has wrong dimension");
      continue;
    }
    if (obj.strong_convexity < 0) {
      Report(&report, "strong_convexity", "objective " + std::to_string(i) + " has m < 0");
    }
    std::string detail;
    if (!CheckGradient(*obj.function, n, &rng, &detail)) {
      Report(&report, "gradient", "objective " + std::to_string(i) + ": " + detail);
    }
  }
  for (int h = 0; h < inst.num_constraints(); ++h) {
    const auto& con = inst.constraints[h];
    if (!con.function || con.function->dimension() != n) {
      Report(&report, "dimension", "constraint " + std::to_string(h) + " has wrong dimension");
      continue;
    }
    std::string detail;
    if (!CheckGradient(*con.function, n, &rng, &detail)) {
      Report(&report, "gradient", "constraint " + std::to_string(h) + ": " + detail);
    }
    // Midpoint convexity spot check.
    for (int trial = 0; trial < 10; ++trial) {
      Vector a(n), b(n);
      for (int c = 0; c < n; ++c) {
        a[c] = rng.Uniform(-1.0, 1.0);
        b[c] = rng.Uniform(-1.0, 1.0);
      }
      const double mid = con.function->Value(0.5 * (a + b));
      const double avg = 0.5 * (con.function->Value(a) + con.function->Value(b));
      if (mid > avg + 1e-9 * std::max(1.0, std::abs(avg))) {
        Report(&report, "nonconvex", "constraint " + std::to_string(h) + " fails midpoint test");
        break;
      }
    }
  }
  return report;
}

Vector ComputeBigM(const Polytope& poly) {
  const int n = static_cast<int>(std::max(poly.D.cols(), poly.A.cols()));
  if (n == 0) throw UnboundedPolytope("polytope has no rows; cannot bound coordinates");
  LinearProgram lp(n);
  for (int r = 0; r < poly.num_inequalities(); ++r) {
    lp.AddRow(poly.D.row(r).transpose(), RowSense::kLessEqual, poly.d[r]);
  }
  for (int r = 0; r < poly.num_equalities(); ++r) {
    lp.AddRow(poly.A.row(r).transpose(), RowSense::kEqual, poly.b[r]);
  }
  Vector M(n);
  LpBasis basis;
  for (int c = 0; c < n; ++c) {
    double best = 0.0;
    for (double sign : {1.0, -1.0}) {
      lp.objective().setZero();
      lp.objective()[c] = -sign;  // maximize sign * x_c
      LpResult res = SolveLp(lp, basis.empty() ? nullptr : &basis);
      if (res.status == LpStatus::kInfeasible) throw EmptyPolytope("polytope is empty");
      if (res.status == LpStatus::kUnbounded) {
        throw UnboundedPolytope("coordinate " + std::to_string(c) + " is unbounded over the polytope");
      }
      if (res.status != LpStatus::kOptimal) throw NumericalFailure("big-M LP did not converge");
      best = std::max(best, sign * res.x[c]);
      basis = res.basis;
    }
    M[c] = best + 1e-6;
  }
  return M;
}

Vector ResolveBigM(const ScpInstance& inst) {
  if (inst.big_m) return *inst.big_m;
  return ComputeBigM(inst.polytope);
}

}  // namespace dipoa
