#include "dipoa/rhadmm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dipoa {

void ValidateAdmmConfig(const AdmmConfig& cfg) {
  if (!(cfg.rho0 > 0) || !(cfg.mu > 0) || !(cfg.tau > 0) || !(cfg.eps_primal > 0) ||
      !(cfg.eps_dual > 0) || cfg.max_iter < 1) {
    throw std::invalid_argument("ADMM parameters must be strictly positive");
  }
  if (!(cfg.relax_alpha > 0 && cfg.relax_alpha < 2)) {
    throw std::invalid_argument("relax_alpha must lie in (0, 2)");
  }
}

const char* ToString(AdmmStatus status) {
  return status == AdmmStatus::kConverged ? "converged" : "iter_limit";
}

Vector PrimalSolution::Consensus() const {
  if (y.empty()) return Vector();
  Vector avg = Vector::Zero(y.front().size());
  for (const auto& v : y) avg += v;
  avg /= static_cast<double>(y.size());
  // A coordinate pinned to zero by any LFC is zero in the consensus point.
  for (const auto& v : y) {
    for (Eigen::Index c = 0; c < v.size(); ++c) {
      if (v[c] == 0.0) avg[c] = 0.0;
    }
  }
  return avg;
}

std::string ResidualTraceCsv(const PrimalSolution& sol) {
  std::ostringstream os;
  os.precision(17);
  os << "iter,primal_res,dual_res,rho\n";
  for (const auto& s : sol.trace) os << s.iter << ',' << s.primal << ',' << s.dual << ',' << s.rho << '\n';
  return os.str();
}

LfcSet BoxSet(const Vector& big_m, const BinaryVector& z) {
  LfcSet set;
  set.kind = LfcSet::Kind::kBox;
  set.bound = Vector::Zero(big_m.size());
  for (Eigen::Index c = 0; c < big_m.size(); ++c) {
    if (z.at(c) != 0) set.bound[c] = big_m[c];
  }
  return set;
}

LfcSet L1BallSet(double radius) {
  LfcSet set;
  set.kind = LfcSet::Kind::kL1Ball;
  set.radius = radius;
  return set;
}

Vector ProjectBox(const Vector& v, const Vector& bound) {
  Vector out(v.size());
  for (Eigen::Index c = 0; c < v.size(); ++c) {
    out[c] = bound[c] > 0 ? std::clamp(v[c], -bound[c], bound[c]) : 0.0;
  }
  return out;
}

Vector ProjectL1Ball(const Vector& v, double radius) {
  if (radius <= 0) return Vector::Zero(v.size());
  if (v.lpNorm<1>() <= radius) return v;
  std::vector<double> mags(v.size());
  for (Eigen::Index c = 0; c < v.size(); ++c) mags[c] = std::abs(v[c]);
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < mags.size(); ++k) {
    cumulative += mags[k];
    const double candidate = (cumulative - radius) / static_cast<double>(k + 1);
    if (mags[k] - candidate > 0) theta = candidate;
  }
  Vector out(v.size());
  for (Eigen::Index c = 0; c < v.size(); ++c) {
    const double m = std::max(std::abs(v[c]) - theta, 0.0);
    out[c] = v[c] < 0 ? -m : m;
  }
  return out;
}

Vector LfcYUpdate(const std::vector<Vector>& contributions, const LfcSet& set) {
  if (contributions.empty()) throw std::invalid_argument("LFC update needs contributions");
  Vector avg = Vector::Zero(contributions.front().size());
  for (const auto& c : contributions) avg += c;
  avg /= static_cast<double>(contributions.size());
  return set.kind == LfcSet::Kind::kBox ? ProjectBox(avg, set.bound)
                                        : ProjectL1Ball(avg, set.radius);
}

double AdaptPenalty(double primal_res, double dual_res, double rho, const AdmmConfig& cfg) {
  if (primal_res > cfg.mu * dual_res) return rho * cfg.tau;
  if (dual_res > cfg.mu * primal_res) return rho / cfg.tau;
  return rho;
}

ConstrainedResult LocalXUpdate(const ScpInstance& inst, int node, LocalMode mode,
                               const Vector& center, double weight, const Vector& x0,
                               MultiplierState* multipliers) {
  ProxProblem prob;
  prob.n = inst.n;
  prob.prox_weight = weight;
  prob.prox_center = center;
  if (!inst.polytope.empty()) prob.polytope = &inst.polytope;
  if (mode == LocalMode::kObjective) {
    prob.terms.push_back(inst.objectives.at(node).function.get());
    for (const auto& g : inst.constraints) prob.constraints.push_back(g.function.get());
  } else {
    for (const auto& g : inst.constraints) prob.terms.push_back(g.function.get());
  }
  ConstrainedResult r = SolveProx(prob, x0, multipliers);
  if (!r.x.allFinite()) throw SubproblemFailure("local update produced a non-finite point");
  return r;
}

AdmmEngine::AdmmEngine(const ScpInstance& inst, Communicator& comm, AdmmConfig cfg)
    : inst_(inst), comm_(comm), cfg_(cfg), big_m_(ResolveBigM(inst)) {
  ValidateAdmmConfig(cfg_);
  if (comm_.num_nodes() != inst_.num_nodes()) {
    throw std::invalid_argument("topology node count differs from the instance");
  }
}

void AdmmEngine::set_config(const AdmmConfig& cfg) {
  ValidateAdmmConfig(cfg);
  cfg_ = cfg;
}

PrimalSolution AdmmEngine::SolvePrimal(const std::vector<BinaryVector>& z) {
  if (static_cast<int>(z.size()) != comm_.num_lfcs()) {
    throw std::invalid_argument("one binary vector per LFC required");
  }
  std::vector<LfcSet> sets;
  for (const auto& zj : z) sets.push_back(BoxSet(big_m_, zj));
  if (!warm_objective_.valid && warm_relaxed_.valid) warm_objective_ = warm_relaxed_;
  return Run(LocalMode::kObjective, sets, &warm_objective_);
}

PrimalSolution AdmmEngine::SolveRelaxedL1(double radius) {
  std::vector<LfcSet> sets(comm_.num_lfcs(), L1BallSet(radius));
  return Run(LocalMode::kObjective, sets, &warm_relaxed_);
}

PrimalSolution AdmmEngine::SolveConstraintSum(const std::vector<BinaryVector>& z) {
  if (static_cast<int>(z.size()) != comm_.num_lfcs()) {
    throw std::invalid_argument("one binary vector per LFC required");
  }
  std::vector<LfcSet> sets;
  for (const auto& zj : z) sets.push_back(BoxSet(big_m_, zj));
  return Run(LocalMode::kConstraintSum, sets, &warm_constraint_);
}

namespace {

Vector ToVector(const Payload& p) { return Eigen::Map<const Vector>(p.data(), p.size()); }

Payload ToPayload(const Vector& v) { return Payload(v.data(), v.data() + v.size()); }

Vector Project(const Vector& v, const LfcSet& set) {
  return set.kind == LfcSet::Kind::kBox ? ProjectBox(v, set.bound) : ProjectL1Ball(v, set.radius);
}

}  // namespace

PrimalSolution AdmmEngine::Run(LocalMode mode, const std::vector<LfcSet>& sets, WarmState* warm) {
  const int N = comm_.num_nodes();
  const int K = comm_.num_lfcs();
  const int n = inst_.n;
  const Hypergraph& graph = comm_.graph();
  const double alpha = cfg_.relax_alpha;

  // Per-worker state. Node i owns x[i], u[i], its copies of the adjacent y_j
  // and its relaxed iterates; LFC j owns y[j].
  std::vector<Vector> x(N, Vector::Zero(n));
  std::vector<Vector> y(K, Vector::Zero(n));
  std::vector<std::vector<Vector>> u(N);
  std::vector<std::vector<Vector>> y_copy(N);
  std::vector<std::vector<Vector>> x_relaxed(N);
  std::vector<MultiplierState> mult(N);
  std::vector<double> node_rho(N, cfg_.rho0);
  std::vector<double> violation(N, 0.0);
  std::vector<char> local_converged(N, 1);
  double rho = cfg_.rho0;

  const bool warm_ok = cfg_.warm_start && warm->valid && static_cast<int>(warm->x.size()) == N &&
                       static_cast<int>(warm->y.size()) == K;
  if (warm_ok) {
    x = warm->x;
    y = warm->y;
    u = warm->u;
    mult = warm->multipliers;
    rho = warm->rho;
    std::fill(node_rho.begin(), node_rho.end(), rho);
  }
  for (int j = 0; j < K; ++j) y[j] = Project(y[j], sets[j]);
  for (int i = 0; i < N; ++i) {
    const auto& lfcs = graph.membership[i];
    if (!warm_ok) u[i].assign(lfcs.size(), Vector::Zero(n));
    y_copy[i].clear();
    for (int j : lfcs) y_copy[i].push_back(y[j]);
    x_relaxed[i].assign(lfcs.size(), Vector::Zero(n));
  }

  PrimalSolution sol;
  const int root = comm_.root();
  bool stop = false;
  int iter = 0;
  double primal_res = kInf, dual_res = kInf;
  for (; iter < cfg_.max_iter && !stop; ++iter) {
    // Local minimization at every node; contributions go to the LFCs.
    comm_.Step([&](int w) {
      if (w >= N) return;
      const int i = w;
      for (const auto& m : comm_.Inbox(i)) {
        if (m.sender != root) continue;
        const double next = m.payload.at(0);
        for (auto& uk : u[i]) uk *= node_rho[i] / next;
        node_rho[i] = next;
      }
      const auto& lfcs = graph.membership[i];
      const double deg = static_cast<double>(lfcs.size());
      Vector center = Vector::Zero(n);
      for (std::size_t k = 0; k < lfcs.size(); ++k) center += y_copy[i][k] - u[i][k];
      center /= deg;
      ConstrainedResult r =
          LocalXUpdate(inst_, i, mode, center, node_rho[i] * deg, x[i], &mult[i]);
      x[i] = r.x;
      violation[i] = r.max_violation;
      local_converged[i] = r.converged ? 1 : 0;
      for (std::size_t k = 0; k < lfcs.size(); ++k) {
        x_relaxed[i][k] = alpha * x[i] + (1.0 - alpha) * y_copy[i][k];
        comm_.Post(i, comm_.LfcWorker(lfcs[k]), ToPayload(x_relaxed[i][k] + u[i][k]));
      }
    });

    // LFC averaging and projection.
    comm_.Step([&](int w) {
      if (w < N || w >= N + K) return;
      const int j = w - N;
      std::vector<Vector> contributions;
      for (const auto& m : comm_.Inbox(w)) contributions.push_back(ToVector(m.payload));
      Vector y_new = LfcYUpdate(contributions, sets[j]);
      const double change = (y_new - y[j]).lpNorm<Eigen::Infinity>();
      y[j] = y_new;
      Payload out = ToPayload(y_new);
      for (int i : graph.edges[j]) comm_.Post(w, i, out);
      comm_.Post(w, root, Payload{change});
    });

    // Dual updates and local residuals; the root gathers the LFC changes.
    double max_change = 0.0;
    comm_.Step([&](int w) {
      if (w == root) {
        for (const auto& m : comm_.Inbox(w)) max_change = std::max(max_change, m.payload.at(0));
        return;
      }
      if (w >= N) return;
      const int i = w;
      const auto msgs = comm_.Inbox(i);
      double local = 0.0;
      for (std::size_t k = 0; k < msgs.size(); ++k) {
        Vector yk = ToVector(msgs[k].payload);
        u[i][k] += x_relaxed[i][k] - yk;
        local = std::max(local, (x[i] - yk).lpNorm<Eigen::Infinity>());
        y_copy[i][k] = std::move(yk);
      }
      comm_.Post(i, root, Payload{local});
    });

    // Root: convergence test and penalty update, sent to the nodes.
    comm_.Step([&](int w) {
      if (w != root) return;
      primal_res = 0.0;
      for (const auto& m : comm_.Inbox(w)) primal_res = std::max(primal_res, m.payload.at(0));
      dual_res = rho * max_change;
      sol.trace.push_back({iter + 1, primal_res, dual_res, rho});
      if (primal_res <= cfg_.eps_primal && dual_res <= cfg_.eps_dual) {
        stop = true;
        return;
      }
      if (iter < cfg_.adapt_iterations) {
        const double next = AdaptPenalty(primal_res, dual_res, rho, cfg_);
        if (next != rho) {
          rho = next;
          for (int i = 0; i < N; ++i) comm_.Post(root, i, Payload{rho});
        }
      }
    });
  }
  // Nodes apply a pending penalty change so the stored duals match rho.
  for (int i = 0; i < N; ++i) {
    if (node_rho[i] != rho) {
      for (auto& uk : u[i]) uk *= node_rho[i] / rho;
      node_rho[i] = rho;
    }
  }

  sol.objective = comm_.ReduceSum([&](int i) -> std::optional<double> {
    if (mode == LocalMode::kObjective) return inst_.objectives[i].function->Value(x[i]);
    double s = 0.0;
    for (const auto& g : inst_.constraints) s += g.function->Value(x[i]);
    return s;
  });
  sol.x = x;
  sol.y = y;
  if (mode == LocalMode::kObjective) {
    const Vector point = sol.Consensus();
    sol.consensus_objective = comm_.ReduceSum([&](int i) -> std::optional<double> {
      return inst_.objectives[i].function->Value(point);
    });
  }
  sol.duals = u;
  sol.primal_residual = primal_res;
  sol.dual_residual = dual_res;
  sol.max_violation = *std::max_element(violation.begin(), violation.end());
  sol.iterations = iter;
  sol.rho = rho;
  // Residuals alone are not enough: a local solve that stopped early (for
  // instance with multipliers far from their optimum) can still agree with its
  // neighbours.
  const bool locals_ok = std::all_of(local_converged.begin(), local_converged.end(), [](char c) { return c != 0; });
  sol.status = stop && locals_ok ? AdmmStatus::kConverged : AdmmStatus::kIterLimit;

  // Only a converged run seeds the next one; multipliers from an infeasible
  // support can be arbitrarily large and would bias the next solve.
  if (!sol.converged()) return sol;
  warm->valid = true;
  warm->x = x;
  warm->y = y;
  warm->u = u;
  warm->multipliers = mult;
  warm->rho = rho;
  return sol;
}

}  // namespace dipoa
