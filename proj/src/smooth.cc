#include "dipoa/smooth.hpp"

#include <algorithm>
#include <cmath>

namespace dipoa {

namespace {

constexpr double kArmijo = 1e-4;

// Newton direction with an increasing diagonal shift until the Cholesky
// factorization succeeds.
Vector NewtonDirection(const Matrix& H, const Vector& g) {
  const int n = static_cast<int>(g.size());
  double shift = 0.0;
  const double scale = std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
  for (int attempt = 0; attempt < 30; ++attempt) {
    Matrix Hs = H;
    if (shift > 0) Hs.diagonal().array() += shift;
    Eigen::LLT<Matrix> llt(Hs);
    if (llt.info() == Eigen::Success) {
      Vector p = -llt.solve(g);
      if (p.allFinite()) return p;
    }
    shift = shift == 0.0 ? 1e-10 * scale : shift * 10.0;
  }
  return -g / std::max(1.0, static_cast<double>(n));
}

}  // namespace

MinimizerResult Minimize(const Objective& objective, const Vector& x0,
                         const MinimizerOptions& options) {
  const int n = static_cast<int>(x0.size());
  MinimizerResult out;
  Vector x = x0;
  Vector g(n);
  Matrix H(n, n);
  bool has_hess = false;
  double f = objective.Evaluate(x, &g, &H, &has_hess);
  if (!std::isfinite(f)) throw SubproblemFailure("objective is not finite at the start point");

  Matrix inv_approx = Matrix::Identity(n, n);
  bool fresh_approx = true;
  int iter = 0;
  for (; iter < options.max_iter; ++iter) {
    const double gnorm = g.lpNorm<Eigen::Infinity>();
    if (gnorm <= options.grad_tol) {
      out.converged = true;
      break;
    }
    Vector p = has_hess ? NewtonDirection(H, g) : Vector(-inv_approx * g);
    double slope = g.dot(p);
    if (!(slope < 0)) {
      p = -g;
      slope = -g.squaredNorm();
      inv_approx.setIdentity();
      fresh_approx = true;
    }

    double t = 1.0;
    Vector x_new(n), g_new(n);
    Matrix H_new(n, n);
    bool h_new = false;
    double f_new = kInf;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = x + t * p;
      f_new = objective.Evaluate(x_new, &g_new, has_hess ? &H_new : nullptr, &h_new);
      if (std::isfinite(f_new)) {
        if (f_new <= f + kArmijo * t * slope) {
          accepted = true;
          break;
        }
        // Near the minimizer the decrease can drown in rounding; accept a
        // full step that clearly shrinks the gradient.
        if (t == 1.0 && f_new <= f + 1e-12 * (1.0 + std::abs(f)) &&
            g_new.lpNorm<Eigen::Infinity>() < 0.5 * gnorm) {
          accepted = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!accepted) {
      if (!has_hess && !fresh_approx) {
        inv_approx.setIdentity();
        fresh_approx = true;
        continue;
      }
      out.converged = gnorm <= options.stall_grad_tol;
      break;
    }

    if (!has_hess) {
      Vector s = x_new - x;
      Vector y = g_new - g;
      const double sy = s.dot(y);
      if (sy > 1e-12 * s.norm() * y.norm()) {
        if (fresh_approx) {
          inv_approx = Matrix::Identity(n, n) * (sy / y.squaredNorm());
          fresh_approx = false;
        }
        const double rho = 1.0 / sy;
        Vector Hy = inv_approx * y;
        inv_approx += rho * rho * (sy + y.dot(Hy)) * (s * s.transpose()) -
                      rho * (Hy * s.transpose() + s * Hy.transpose());
      }
    }
    x = x_new;
    f = f_new;
    g = g_new;
    if (has_hess) {
      H = H_new;
      has_hess = h_new;
    }
  }
  out.x = x;
  out.value = f;
  out.grad_norm = g.lpNorm<Eigen::Infinity>();
  out.iterations = iter;
  if (!out.converged && out.grad_norm <= options.stall_grad_tol) out.converged = true;
  return out;
}

namespace {

class AugmentedLagrangian final : public Objective {
 public:
  AugmentedLagrangian(const ProxProblem& prob, const MultiplierState& state)
      : prob_(prob), state_(state) {}

  double Evaluate(const Vector& x, Vector* grad, Matrix* hess, bool* has_hess) const override {
    const int n = prob_.n;
    double v = 0.0;
    grad->setZero(n);
    bool want_hess = hess != nullptr;
    if (want_hess) hess->setZero(n, n);
    Vector gt(n);
    Matrix ht(n, n);

    for (const SmoothFunction* f : prob_.terms) {
      v += f->ValueAndGradient(x, &gt);
      *grad += gt;
      if (want_hess) {
        if (f->Hessian(x, &ht)) {
          *hess += ht;
        } else {
          want_hess = false;
        }
      }
    }
    if (prob_.prox_weight > 0) {
      Vector diff = x - prob_.prox_center;
      v += 0.5 * prob_.prox_weight * diff.squaredNorm();
      *grad += prob_.prox_weight * diff;
      if (want_hess) hess->diagonal().array() += prob_.prox_weight;
    }

    const double c = state_.penalty;
    if (prob_.polytope != nullptr) {
      const Polytope& P = *prob_.polytope;
      for (int r = 0; r < P.num_inequalities(); ++r) {
        const double shifted = state_.inequality[r] + c * (P.D.row(r).dot(x) - P.d[r]);
        if (shifted > 0) {
          v += (shifted * shifted - state_.inequality[r] * state_.inequality[r]) / (2.0 * c);
          *grad += shifted * P.D.row(r).transpose();
          if (want_hess) hess->noalias() += c * P.D.row(r).transpose() * P.D.row(r);
        } else {
          v -= state_.inequality[r] * state_.inequality[r] / (2.0 * c);
        }
      }
      for (int r = 0; r < P.num_equalities(); ++r) {
        const double h = P.A.row(r).dot(x) - P.b[r];
        v += state_.equality[r] * h + 0.5 * c * h * h;
        *grad += (state_.equality[r] + c * h) * P.A.row(r).transpose();
        if (want_hess) hess->noalias() += c * P.A.row(r).transpose() * P.A.row(r);
      }
    }
    for (std::size_t h = 0; h < prob_.constraints.size(); ++h) {
      const SmoothFunction* g = prob_.constraints[h];
      const double lam = state_.nonlinear[h];
      const double gv = g->ValueAndGradient(x, &gt);
      const double shifted = lam + c * gv;
      if (shifted > 0) {
        v += (shifted * shifted - lam * lam) / (2.0 * c);
        *grad += shifted * gt;
        if (want_hess) {
          if (g->Hessian(x, &ht)) {
            hess->noalias() += c * gt * gt.transpose() + shifted * ht;
          } else {
            want_hess = false;
          }
        }
      } else {
        v -= lam * lam / (2.0 * c);
      }
    }
    if (has_hess != nullptr) *has_hess = want_hess && hess != nullptr;
    return v;
  }

 private:
  const ProxProblem& prob_;
  const MultiplierState& state_;
};

double TermsValue(const ProxProblem& prob, const Vector& x) {
  double v = 0.0;
  for (const SmoothFunction* f : prob.terms) v += f->Value(x);
  return v;
}

}  // namespace

ConstrainedResult SolveProx(const ProxProblem& prob, const Vector& x0, MultiplierState* state,
                            const ConstrainedOptions& options) {
  const int mi = prob.polytope ? prob.polytope->num_inequalities() : 0;
  const int me = prob.polytope ? prob.polytope->num_equalities() : 0;
  const int mg = static_cast<int>(prob.constraints.size());
  MultiplierState local;
  if (state == nullptr) state = &local;
  if (state->inequality.size() != mi || state->equality.size() != me ||
      state->nonlinear.size() != mg) {
    state->inequality = Vector::Zero(mi);
    state->equality = Vector::Zero(me);
    state->nonlinear = Vector::Zero(mg);
    state->penalty = 0.0;
  }
  if (!(state->penalty > 0)) state->penalty = options.penalty0 * std::max(1.0, prob.prox_weight);

  ConstrainedResult out;
  Vector x = x0;
  if (mi + me + mg == 0) {
    AugmentedLagrangian al(prob, *state);
    MinimizerResult r = Minimize(al, x, options.inner);
    out.x = r.x;
    out.objective = TermsValue(prob, r.x);
    out.max_violation = 0.0;
    out.outer_iterations = 1;
    out.converged = r.converged;
    return out;
  }

  double prev_violation = kInf;
  for (int outer = 0; outer < options.max_outer; ++outer) {
    AugmentedLagrangian al(prob, *state);
    MinimizerResult r = Minimize(al, x, options.inner);
    x = r.x;
    const double c = state->penalty;

    double violation = 0.0;
    double multiplier_shift = 0.0;
    auto update_ineq = [&](double& lam, double resid) {
      violation = std::max(violation, resid);
      const double next = std::max(0.0, lam + c * resid);
      multiplier_shift = std::max(multiplier_shift, std::abs(next - lam) / c);
      lam = next;
    };
    if (prob.polytope != nullptr) {
      const Polytope& P = *prob.polytope;
      for (int k = 0; k < mi; ++k) update_ineq(state->inequality[k], P.D.row(k).dot(x) - P.d[k]);
      for (int k = 0; k < me; ++k) {
        const double h = P.A.row(k).dot(x) - P.b[k];
        violation = std::max(violation, std::abs(h));
        state->equality[k] += c * h;
      }
    }
    for (int h = 0; h < mg; ++h) update_ineq(state->nonlinear[h], prob.constraints[h]->Value(x));

    out.outer_iterations = outer + 1;
    out.max_violation = violation;
    if (violation <= options.feas_tol && multiplier_shift <= options.feas_tol && r.converged) {
      out.converged = true;
      break;
    }
    if (violation > 0.25 * prev_violation) {
      state->penalty = std::min(options.penalty_max, 10.0 * state->penalty);
    }
    prev_violation = violation;
  }
  out.x = x;
  out.objective = TermsValue(prob, x);
  return out;
}

}  // namespace dipoa
