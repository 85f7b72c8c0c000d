#include "dipoa/heuristics.hpp"

#include <algorithm>
#include <numeric>

namespace dipoa {

Vector ProjectSparsity(const Vector& y, int kappa) {
  const int n = static_cast<int>(y.size());
  if (kappa >= n) return y;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return std::abs(y[a]) > std::abs(y[b]); });
  Vector out = Vector::Zero(n);
  for (int k = 0; k < std::max(kappa, 0); ++k) out[order[k]] = y[order[k]];
  return out;
}

BinaryVector BinariesFromSupport(const Vector& y) {
  BinaryVector z(y.size(), 0);
  for (Eigen::Index c = 0; c < y.size(); ++c) z[c] = y[c] != 0.0 ? 1 : 0;
  return z;
}

SfpResult RunSfp(AdmmEngine& engine, Communicator& comm, const ScpInstance& inst) {
  SfpResult out;
  const int K = comm.num_lfcs();
  const double radius = inst.kappa * engine.big_m().maxCoeff();
  out.relaxed = engine.SolveRelaxedL1(radius);
  if (out.relaxed.converged()) out.relax_obj = out.relaxed.objective;
  for (int i = 0; i < inst.num_nodes(); ++i) {
    out.seed_cuts.push_back(MakeLinearCut(i, out.relaxed.x[i], inst.objectives[i]));
  }

  // Each LFC projects its own variable and reports the binaries to the root.
  comm.Step([&](int w) {
    if (w < comm.num_nodes() || w >= comm.num_nodes() + K) return;
    const int j = w - comm.num_nodes();
    BinaryVector z = BinariesFromSupport(ProjectSparsity(out.relaxed.y[j], inst.kappa));
    comm.Post(w, comm.root(), Payload(z.begin(), z.end()));
  });
  out.z0.assign(K, BinaryVector(inst.n, 0));
  for (const auto& m : comm.Collect(comm.root(), comm.round() - 1)) {
    const int j = m.sender - comm.num_nodes();
    for (int c = 0; c < inst.n; ++c) out.z0[j][c] = m.payload[c] != 0.0 ? 1 : 0;
  }

  out.restricted = engine.SolvePrimal(out.z0);
  if (out.restricted.converged() && out.restricted.max_violation <= 1e-6) {
    out.ub0 = out.restricted.consensus_objective;
  }
  for (int i = 0; i < inst.num_nodes(); ++i) {
    out.seed_cuts.push_back(MakeLinearCut(i, out.restricted.x[i], inst.objectives[i]));
  }
  return out;
}

InfeasibilityCertificate DetectInfeasibility(AdmmEngine& engine, const ScpInstance& inst,
                                             const std::vector<BinaryVector>& z) {
  InfeasibilityCertificate cert;
  cert.solution = engine.SolveConstraintSum(z);
  cert.objective = cert.solution.objective;
  cert.xbars = cert.solution.x;
  for (int i = 0; i < static_cast<int>(cert.xbars.size()); ++i) {
    for (int h = 0; h < inst.num_constraints(); ++h) {
      if (inst.constraints[h].function->Value(cert.xbars[i]) > 1e-8) cert.violated.emplace_back(i, h);
    }
  }
  return cert;
}

}  // namespace dipoa
