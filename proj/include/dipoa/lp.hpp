#ifndef DIPOA_LP_HPP_
#define DIPOA_LP_HPP_

#include <vector>

#include "dipoa/types.hpp"

namespace dipoa {

enum class RowSense { kLessEqual, kEqual };

// Dense linear program
//   min c'w  s.t.  a_r'w <= b_r (or = b_r),  lower <= w <= upper.
// Built for problems with few columns and many rows (the master relaxation),
// so rows are stored densely and appended cheaply.
class LinearProgram {
 public:
  explicit LinearProgram(int num_cols);

  int num_cols() const { return num_cols_; }
  int num_rows() const { return static_cast<int>(rhs_.size()); }

  Vector& objective() { return objective_; }
  const Vector& objective() const { return objective_; }
  Vector& lower() { return lower_; }
  const Vector& lower() const { return lower_; }
  Vector& upper() { return upper_; }
  const Vector& upper() const { return upper_; }

  int AddRow(const Vector& coefs, RowSense sense, double rhs);
  // a'w >= rhs, stored as -a'w <= -rhs.
  int AddGreaterEqual(const Vector& coefs, double rhs);

  Eigen::Map<const Vector> row(int r) const {
    return Eigen::Map<const Vector>(coefs_.data() + static_cast<std::ptrdiff_t>(r) * num_cols_,
                                    num_cols_);
  }
  double rhs(int r) const { return rhs_[r]; }
  RowSense sense(int r) const { return sense_[r]; }
  double row_norm(int r) const { return norms_[r]; }

 private:
  int num_cols_;
  Vector objective_;
  Vector lower_;
  Vector upper_;
  std::vector<double> coefs_;  // row-major
  std::vector<double> rhs_;
  std::vector<RowSense> sense_;
  std::vector<double> norms_;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

const char* ToString(LpStatus status);

// A basis is the set of num_cols active rows. Ids below 2 * num_cols denote
// bound rows (2k: lower bound of column k, 2k+1: upper bound); the rest are
// constraint rows offset by 2 * num_cols.
struct LpBasis {
  std::vector<int> rows;
  std::vector<signed char> signs;

  bool empty() const { return rows.empty(); }
};

struct LpResult {
  LpStatus status = LpStatus::kIterationLimit;
  Vector x;
  double objective = kInf;
  LpBasis basis;
  int iterations = 0;
};

struct LpOptions {
  double feasibility_tol = 1e-9;
  double pivot_tol = 1e-10;
  // Stand-in for infinite bounds; an optimum that leans on one is unbounded.
  double artificial_bound = 1e8;
  int max_iterations = 0;  // 0 selects a size-based default
};

// Dual simplex on the active-row representation. Starts from `warm` when it
// is a dual-feasible basis for the current objective, otherwise from the
// bound-row basis, which is always dual feasible.
LpResult SolveLp(const LinearProgram& lp, const Vector& lower, const Vector& upper,
                 const LpBasis* warm = nullptr, const LpOptions& options = {});

inline LpResult SolveLp(const LinearProgram& lp, const LpBasis* warm = nullptr,
                        const LpOptions& options = {}) {
  return SolveLp(lp, lp.lower(), lp.upper(), warm, options);
}

}  // namespace dipoa

#endif  // DIPOA_LP_HPP_
