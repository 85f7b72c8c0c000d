#include "dipoa/lp.hpp"

#include <algorithm>
#include <cmath>

namespace dipoa {

LinearProgram::LinearProgram(int num_cols)
    : num_cols_(num_cols),
      objective_(Vector::Zero(num_cols)),
      lower_(Vector::Constant(num_cols, -kInf)),
      upper_(Vector::Constant(num_cols, kInf)) {}

int LinearProgram::AddRow(const Vector& coefs, RowSense sense, double rhs) {
  if (coefs.size() != num_cols_) throw std::invalid_argument("LP row has wrong length");
  coefs_.insert(coefs_.end(), coefs.data(), coefs.data() + num_cols_);
  rhs_.push_back(rhs);
  sense_.push_back(sense);
  norms_.push_back(std::max(coefs.norm(), 1e-300));
  return num_rows() - 1;
}

int LinearProgram::AddGreaterEqual(const Vector& coefs, double rhs) {
  return AddRow(-coefs, RowSense::kLessEqual, -rhs);
}

const char* ToString(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
    case LpStatus::kIterationLimit:
      return "iteration_limit";
  }
  return "unknown";
}

namespace {

class DualSimplex {
 public:
  DualSimplex(const LinearProgram& lp, const Vector& lower, const Vector& upper,
              const LpOptions& options)
      : lp_(lp), lower_(lower), upper_(upper), opt_(options), n_(lp.num_cols()) {}

  LpResult Run(const LpBasis* warm) {
    LpResult result;
    if (!(warm != nullptr && TryWarm(*warm))) ColdStart();

    const int max_iter =
        opt_.max_iterations > 0 ? opt_.max_iterations : 2000 + 50 * (n_ + lp_.num_rows());
    int degenerate_run = 0;
    for (int iter = 0; iter < max_iter; ++iter) {
      result.iterations = iter;
      Factor();
      const bool bland = degenerate_run > 50;
      int entering = -1;
      double entering_sign = 1.0;
      FindEntering(bland, &entering, &entering_sign);
      if (entering < 0) {
        Finish(LpStatus::kOptimal, &result);
        for (int i = 0; i < n_; ++i) {
          if (IsArtificial(basis_[i]) && lambda_[i] > 1e-9) result.status = LpStatus::kUnbounded;
        }
        return result;
      }

      Vector a_q = entering_sign * RowCoefs(entering);
      Vector d = lu_.transpose().solve(a_q);
      const int leave = RatioTest(d, bland);
      if (leave < 0) {
        Finish(LpStatus::kInfeasible, &result);
        return result;
      }
      const double step = std::max(lambda_[leave], 0.0) / d[leave];
      degenerate_run = step <= 1e-14 ? degenerate_run + 1 : 0;
      basis_[leave] = entering;
      signs_[leave] = static_cast<signed char>(entering_sign);
    }
    Factor();
    Finish(LpStatus::kIterationLimit, &result);
    return result;
  }

 private:
  int NumIds() const { return 2 * n_ + lp_.num_rows(); }

  bool IsBound(int id) const { return id < 2 * n_; }

  bool IsArtificial(int id) const {
    if (!IsBound(id)) return false;
    const int k = id / 2;
    return (id % 2 == 0) ? !std::isfinite(lower_[k]) : !std::isfinite(upper_[k]);
  }

  bool IsEquality(int id) const {
    return !IsBound(id) && lp_.sense(id - 2 * n_) == RowSense::kEqual;
  }

  Vector RowCoefs(int id) const {
    if (IsBound(id)) {
      Vector a = Vector::Zero(n_);
      a[id / 2] = (id % 2 == 0) ? -1.0 : 1.0;
      return a;
    }
    return lp_.row(id - 2 * n_);
  }

  double RowRhs(int id) const {
    if (IsBound(id)) {
      const int k = id / 2;
      if (id % 2 == 0) {
        return std::isfinite(lower_[k]) ? -lower_[k] : opt_.artificial_bound;
      }
      return std::isfinite(upper_[k]) ? upper_[k] : opt_.artificial_bound;
    }
    return lp_.rhs(id - 2 * n_);
  }

  double RowNorm(int id) const { return IsBound(id) ? 1.0 : lp_.row_norm(id - 2 * n_); }

  double RowActivity(int id, const Vector& w) const {
    if (IsBound(id)) return (id % 2 == 0) ? -w[id / 2] : w[id / 2];
    return lp_.row(id - 2 * n_).dot(w);
  }

  void ColdStart() {
    basis_.assign(n_, 0);
    signs_.assign(n_, 1);
    const Vector& c = lp_.objective();
    for (int k = 0; k < n_; ++k) {
      const bool lo_finite = std::isfinite(lower_[k]);
      const bool hi_finite = std::isfinite(upper_[k]);
      bool use_lower;
      if (c[k] > 0) {
        use_lower = true;
      } else if (c[k] < 0) {
        use_lower = false;
      } else {
        use_lower = lo_finite || !hi_finite;
      }
      basis_[k] = use_lower ? 2 * k : 2 * k + 1;
    }
  }

  bool TryWarm(const LpBasis& warm) {
    if (static_cast<int>(warm.rows.size()) != n_ || warm.signs.size() != warm.rows.size()) {
      return false;
    }
    std::vector<char> seen(NumIds(), 0);
    for (int id : warm.rows) {
      if (id < 0 || id >= NumIds() || seen[id]) return false;
      seen[id] = 1;
    }
    basis_ = warm.rows;
    signs_ = warm.signs;
    Factor();
    if (!(lu_.rcond() > 1e-12)) return false;
    for (int i = 0; i < n_; ++i) {
      if (!IsEquality(basis_[i]) && lambda_[i] < -1e-9) return false;
    }
    return true;
  }

  void Factor() {
    Matrix B(n_, n_);
    Vector b(n_);
    for (int i = 0; i < n_; ++i) {
      B.row(i) = signs_[i] * RowCoefs(basis_[i]).transpose();
      b[i] = signs_[i] * RowRhs(basis_[i]);
    }
    lu_.compute(B);
    w_ = lu_.solve(b);
    lambda_ = lu_.transpose().solve(lp_.objective());
    lambda_ = -lambda_;
    in_basis_.assign(NumIds(), 0);
    for (int id : basis_) in_basis_[id] = 1;
  }

  void FindEntering(bool bland, int* entering, double* sign) const {
    double best = 0.0;
    for (int id = 0; id < NumIds(); ++id) {
      if (in_basis_[id]) continue;
      const double rhs = RowRhs(id);
      const double norm = RowNorm(id);
      const double resid = RowActivity(id, w_) - rhs;
      double viol = resid / norm;
      double s = 1.0;
      if (IsEquality(id) && resid < 0) {
        viol = -viol;
        s = -1.0;
      }
      const double tol = opt_.feasibility_tol * std::max(1.0, std::abs(rhs) / norm);
      if (viol <= tol) continue;
      if (bland) {
        *entering = id;
        *sign = s;
        return;
      }
      if (viol > best) {
        best = viol;
        *entering = id;
        *sign = s;
      }
    }
  }

  int RatioTest(const Vector& d, bool bland) const {
    const double piv = opt_.pivot_tol * std::max(1.0, d.lpNorm<Eigen::Infinity>());
    if (bland) {
      double tmin = kInf;
      for (int i = 0; i < n_; ++i) {
        if (IsEquality(basis_[i]) || d[i] <= piv) continue;
        tmin = std::min(tmin, std::max(lambda_[i], 0.0) / d[i]);
      }
      int leave = -1;
      for (int i = 0; i < n_; ++i) {
        if (IsEquality(basis_[i]) || d[i] <= piv) continue;
        const double t = std::max(lambda_[i], 0.0) / d[i];
        if (t <= tmin + 1e-12 && (leave < 0 || basis_[i] < basis_[leave])) leave = i;
      }
      return leave;
    }
    // Harris two-pass: bound the step with a small dual tolerance, then take
    // the largest pivot among rows that block within that bound.
    constexpr double kDualTol = 1e-11;
    double tmax = kInf;
    for (int i = 0; i < n_; ++i) {
      if (IsEquality(basis_[i]) || d[i] <= piv) continue;
      tmax = std::min(tmax, (std::max(lambda_[i], 0.0) + kDualTol) / d[i]);
    }
    if (!std::isfinite(tmax)) return -1;
    int leave = -1;
    for (int i = 0; i < n_; ++i) {
      if (IsEquality(basis_[i]) || d[i] <= piv) continue;
      const double t = std::max(lambda_[i], 0.0) / d[i];
      if (t > tmax) continue;
      if (leave < 0 || d[i] > d[leave] ||
          (d[i] == d[leave] && basis_[i] < basis_[leave])) {
        leave = i;
      }
    }
    return leave;
  }

  void Finish(LpStatus status, LpResult* result) const {
    result->status = status;
    result->x = w_;
    result->objective = lp_.objective().dot(w_);
    result->basis.rows = basis_;
    result->basis.signs = signs_;
  }

  const LinearProgram& lp_;
  const Vector& lower_;
  const Vector& upper_;
  LpOptions opt_;
  int n_;
  std::vector<int> basis_;
  std::vector<signed char> signs_;
  std::vector<char> in_basis_;
  Eigen::PartialPivLU<Matrix> lu_;
  Vector w_;
  Vector lambda_;
};

}  // namespace

LpResult SolveLp(const LinearProgram& lp, const Vector& lower, const Vector& upper,
                 const LpBasis* warm, const LpOptions& options) {
  if (lower.size() != lp.num_cols() || upper.size() != lp.num_cols()) {
    throw std::invalid_argument("LP bound vectors have wrong length");
  }
  for (int k = 0; k < lp.num_cols(); ++k) {
    if (lower[k] > upper[k]) {
      LpResult r;
      r.status = LpStatus::kInfeasible;
      return r;
    }
  }
  DualSimplex solver(lp, lower, upper, options);
  return solver.Run(warm);
}

}  // namespace dipoa
