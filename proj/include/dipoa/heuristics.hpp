#ifndef DIPOA_HEURISTICS_HPP_
#define DIPOA_HEURISTICS_HPP_

#include <utility>
#include <vector>

#include "dipoa/cuts.hpp"
#include "dipoa/rhadmm.hpp"

namespace dipoa {

// Keeps the kappa largest-magnitude entries (earlier index wins ties) and
// zeros the rest.
Vector ProjectSparsity(const Vector& y, int kappa);

// 1 where the entry is nonzero.
BinaryVector BinariesFromSupport(const Vector& y);

struct SfpResult {
  std::vector<BinaryVector> z0;  // per LFC
  double ub0 = kInf;             // +inf when the restricted solve failed
  double relax_obj = -kInf;      // -inf when the relaxation did not converge
  std::vector<Cut> seed_cuts;
  PrimalSolution relaxed;
  PrimalSolution restricted;
};

// Relax to the l1 ball of radius kappa * max(M), project each LFC variable to
// its kappa largest entries, then re-solve with the support fixed.
SfpResult RunSfp(AdmmEngine& engine, Communicator& comm, const ScpInstance& inst);

struct InfeasibilityCertificate {
  double objective = 0.0;
  std::vector<Vector> xbars;                   // per node
  std::vector<std::pair<int, int>> violated;   // (node, constraint) with g > 1e-8
  PrimalSolution solution;

  bool certified() const { return objective > 1e-8; }
};

// min sum_i sum_h g_h(x_i) over consensus, Omega and the big-M box of z.
InfeasibilityCertificate DetectInfeasibility(AdmmEngine& engine, const ScpInstance& inst,
                                             const std::vector<BinaryVector>& z);

}  // namespace dipoa

#endif  // DIPOA_HEURISTICS_HPP_
