#ifndef DIPOA_RHADMM_HPP_
#define DIPOA_RHADMM_HPP_

#include <optional>
#include <string>
#include <vector>

#include "dipoa/network.hpp"
#include "dipoa/problem.hpp"
#include "dipoa/smooth.hpp"

namespace dipoa {

struct AdmmConfig {
  double rho0 = 1.0;
  double relax_alpha = 1.6;
  double mu = 10.0;
  double tau = 2.0;
  double eps_primal = 1e-6;
  double eps_dual = 1e-6;
  int max_iter = 5000;
  // Penalty adaptation runs every iteration up to this count, then rho is
  // frozen so the fixed-penalty convergence theory applies.
  int adapt_iterations = 1000;
  bool warm_start = true;
};

// Throws std::invalid_argument when a field is out of range.
void ValidateAdmmConfig(const AdmmConfig& cfg);

enum class AdmmStatus { kConverged, kIterLimit };

const char* ToString(AdmmStatus status);

struct ResidualSample {
  int iter = 0;
  double primal = 0.0;
  double dual = 0.0;
  double rho = 0.0;
};

struct PrimalSolution {
  std::vector<Vector> x;                   // per node
  std::vector<Vector> y;                   // per LFC
  std::vector<std::vector<Vector>> duals;  // duals[i][k]: node i, its k-th LFC (scaled)
  double objective = kInf;            // sum_i f_i(x_i)
  double consensus_objective = kInf;  // sum_i f_i at the consensus point
  double primal_residual = kInf;
  double dual_residual = kInf;
  double max_violation = 0.0;  // worst local constraint violation
  AdmmStatus status = AdmmStatus::kIterLimit;
  int iterations = 0;
  double rho = 1.0;
  std::vector<ResidualSample> trace;

  bool converged() const { return status == AdmmStatus::kConverged; }
  // Average of the LFC variables; a coordinate any LFC pins to zero stays zero.
  Vector Consensus() const;
};

// CSV with header iter,primal_res,dual_res,rho.
std::string ResidualTraceCsv(const PrimalSolution& sol);

// Feasible set for one LFC variable.
struct LfcSet {
  enum class Kind { kBox, kL1Ball };
  Kind kind = Kind::kBox;
  Vector bound;         // box half-widths (M * z); zero entries pin the coordinate to 0
  double radius = 0.0;  // l1 radius
};

LfcSet BoxSet(const Vector& big_m, const BinaryVector& z);
LfcSet L1BallSet(double radius);

// Euclidean projection onto {|v_c| <= bound_c}; coordinates with bound 0
// come out exactly 0.
Vector ProjectBox(const Vector& v, const Vector& bound);
// Euclidean projection onto the l1 ball, by sorting.
Vector ProjectL1Ball(const Vector& v, double radius);

// Average of the member contributions, then projection.
Vector LfcYUpdate(const std::vector<Vector>& contributions, const LfcSet& set);

double AdaptPenalty(double primal_res, double dual_res, double rho, const AdmmConfig& cfg);

enum class LocalMode {
  kObjective,      // f_i under Omega and the nonlinear constraints
  kConstraintSum,  // sum_h g_h under Omega only
};

// argmin  local(x) + (weight/2)||x - center||^2  over the mode's constraint set.
// `multipliers` (may be null) carries augmented-Lagrangian state between calls.
ConstrainedResult LocalXUpdate(const ScpInstance& inst, int node, LocalMode mode,
                               const Vector& center, double weight, const Vector& x0,
                               MultiplierState* multipliers = nullptr);

// Consensus ADMM with over-relaxation and residual-balancing penalty over a
// Communicator. Keeps one warm-start state per problem family.
class AdmmEngine {
 public:
  AdmmEngine(const ScpInstance& inst, Communicator& comm, AdmmConfig cfg);

  // Fixed binaries: y_j in [-M*z_j, M*z_j].
  PrimalSolution SolvePrimal(const std::vector<BinaryVector>& z);
  // l1 relaxation: ||y_j||_1 <= radius.
  PrimalSolution SolveRelaxedL1(double radius);
  // min sum_i sum_h g_h(x_i) with y_j in [-M*z_j, M*z_j].
  PrimalSolution SolveConstraintSum(const std::vector<BinaryVector>& z);

  const Vector& big_m() const { return big_m_; }
  const AdmmConfig& config() const { return cfg_; }
  void set_config(const AdmmConfig& cfg);

 private:
  struct WarmState {
    bool valid = false;
    std::vector<Vector> x;
    std::vector<Vector> y;
    std::vector<std::vector<Vector>> u;
    std::vector<MultiplierState> multipliers;
    double rho = 1.0;
  };

  PrimalSolution Run(LocalMode mode, const std::vector<LfcSet>& sets, WarmState* warm);

  const ScpInstance& inst_;
  Communicator& comm_;
  AdmmConfig cfg_;
  Vector big_m_;
  WarmState warm_objective_;
  WarmState warm_relaxed_;
  WarmState warm_constraint_;
};

}  // namespace dipoa

#endif  // DIPOA_RHADMM_HPP_
