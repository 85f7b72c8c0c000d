#ifndef DIPOA_MASTER_HPP_
#define DIPOA_MASTER_HPP_

#include <string>
#include <vector>

#include "dipoa/cuts.hpp"
#include "dipoa/lp.hpp"
#include "dipoa/network.hpp"
#include "dipoa/problem.hpp"

namespace dipoa {

enum class MasterMode { kMilp, kMiqcp };

const char* ToString(MasterMode mode);

struct MasterOptions {
  MasterMode mode = MasterMode::kMilp;
  // Nodes whose bound reaches the cutoff are pruned; the driver passes a
  // value just below its incumbent so only improving supports are searched.
  double cutoff = kInf;
  double abs_gap = 1e-6;
  double int_tol = 1e-6;
  int max_nodes = 200000;
  // Kelley tangents of the quadratic cuts are added until the worst
  // violation is within this relative tolerance.
  double tangent_tol = 1e-7;
  int max_tangent_rounds = 200;
  // Tangent LPs bound the node from below, so fractional nodes only get a few
  // refinement rounds; integral solutions are refined until the cuts hold.
  int fractional_tangent_rounds = 3;
};

enum class MasterStatus { kOptimal, kInfeasible, kCutoff, kNodeLimit };

const char* ToString(MasterStatus status);

struct MasterSolution {
  MasterStatus status = MasterStatus::kInfeasible;
  std::vector<BinaryVector> z;  // per LFC
  BinaryVector support;         // coordinates switched on in every LFC
  double lower_bound = kInf;
  double objective = kInf;      // incumbent value of the master
  Vector xstar;                 // consensus value of the continuous part
  std::vector<Vector> x;        // per node (all equal to xstar)
  std::vector<Vector> ystar;    // per LFC (all equal to xstar)
  Vector alpha;
  int nodes = 0;
  int lp_iterations = 0;
};

struct RelaxationResult {
  LpStatus status = LpStatus::kInfeasible;
  double value = kInf;
  Vector x;
  Vector alpha;
  Vector z;  // all integer columns, LFC-major
};

// The relaxed master problem. Consensus x_i = y_j over a connected topology
// makes every local copy equal, so the model carries one x vector, one
// epigraph variable per node and a support indicator w with |x_c| <= M_c w_c.
// With shared_support (the default) w is the binary vector every LFC
// receives; otherwise each LFC keeps its own binaries z_j with w_c <= z_jc.
// Both give the same optimum and relaxation bound, but per-LFC binaries
// multiply symmetric branches.
class MasterModel {
 public:
  MasterModel(const ScpInstance& inst, const Hypergraph& graph, Vector big_m,
              bool shared_support = true);

  // Adds rows for pool entries not yet seen.
  void Sync(const CutPool& pool);
  void AddCut(const Cut& cut);
  // Excludes every binary profile whose common support lies inside `support`.
  void AddSupportGuard(const BinaryVector& support);

  MasterSolution Solve(const MasterOptions& options);

  // Continuous relaxation with integer columns restricted to
  // [lower, upper] (LFC-major; sized num_integer()).
  RelaxationResult SolveRelaxation(const Vector& lower, const Vector& upper, MasterMode mode);

  std::string ToLpFormat(MasterMode mode) const;

  int num_integer() const { return shared_ ? n_ : K_ * n_; }
  int num_cols() const { return num_cols_; }
  int num_dynamic_rows() const { return static_cast<int>(dynamic_.size()); }
  int num_tangents() const { return num_tangents_; }
  int num_cuts_seen() const { return pool_seen_; }

 private:
  enum class RowKind { kCut, kTangent, kGuard };
  struct DynamicRow {
    RowKind kind;
    Vector coefs;
    double rhs;
  };
  struct QuadraticCut {
    int node;
    Vector xbar;
    double fval;
    Vector grad;
    double m;
  };

  int XCol(int c) const { return c; }
  int AlphaCol(int i) const { return n_ + i; }
  int WCol(int c) const { return n_ + N_ + c; }
  int ZCol(int j, int c) const { return shared_ ? WCol(c) : n_ + N_ + n_ + j * n_ + c; }
  int IntegerCol(int k) const { return shared_ ? WCol(k) : n_ + N_ + n_ + k; }

  LinearProgram BuildLp(MasterMode mode) const;
  // Solves at the given integer bounds; in MIQCP mode adds tangents (to both
  // `lp` and the model) while the quadratic cuts are violated, stopping early
  // once the bound reaches prune_at.
  LpResult SolveNode(LinearProgram* lp, MasterMode mode, const Vector& lower, const Vector& upper,
                     const LpBasis* warm, const MasterOptions& options, double prune_at,
                     int* lp_iterations);
  bool Integral(const Vector& sol, double int_tol) const;
  int AddViolatedTangents(LinearProgram* lp, const Vector& sol, double tol);

  int n_, N_, K_;
  bool shared_;
  int num_cols_;
  int kappa_;
  Vector big_m_;
  Polytope polytope_;
  std::vector<DynamicRow> dynamic_;
  std::vector<QuadraticCut> quadratic_;
  int num_tangents_ = 0;
  int pool_seen_ = 0;
  LpBasis root_basis_[2];
};

// One-shot convenience: builds a model from the pool and solves it.
MasterSolution SolveMaster(const CutPool& pool, const ScpInstance& inst, const Hypergraph& graph,
                           MasterMode mode, double incumbent_ub = kInf,
                           bool shared_support = true);

// Most fractional coordinate of `values` (ties to the lowest index), or -1
// when all are within int_tol of 0 or 1.
int SelectBranchingIndex(const Vector& values, double int_tol = 1e-6);

// Exact optimum by enumerating every support of size min(kappa, n) and
// solving the restricted convex program centrally.
struct EnumerationResult {
  double objective = kInf;
  BinaryVector support;
  Vector x;
  int supports_tried = 0;
};
EnumerationResult EnumerateSupports(const ScpInstance& inst);

}  // namespace dipoa

#endif  // DIPOA_MASTER_HPP_
