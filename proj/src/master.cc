#include "dipoa/master.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

#include "dipoa/smooth.hpp"

namespace dipoa {

const char* ToString(MasterMode mode) { return mode == MasterMode::kMilp ? "milp" : "miqcp"; }

const char* ToString(MasterStatus status) {
  switch (status) {
    case MasterStatus::kOptimal:
      return "optimal";
    case MasterStatus::kInfeasible:
      return "infeasible";
    case MasterStatus::kCutoff:
      return "cutoff";
    case MasterStatus::kNodeLimit:
      return "node_limit";
  }
  return "unknown";
}

int SelectBranchingIndex(const Vector& values, double int_tol) {
  int best = -1;
  double best_frac = int_tol;
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    const double frac = std::min(values[k] - std::floor(values[k]), std::ceil(values[k]) - values[k]);
    if (frac > best_frac + 1e-12) {
      best_frac = frac;
      best = static_cast<int>(k);
    }
  }
  return best;
}

MasterModel::MasterModel(const ScpInstance& inst, const Hypergraph& graph, Vector big_m,
                         bool shared_support)
    : n_(inst.n),
      N_(inst.num_nodes()),
      K_(graph.num_edges()),
      shared_(shared_support),
      kappa_(inst.kappa),
      big_m_(std::move(big_m)),
      polytope_(inst.polytope) {
  num_cols_ = n_ + N_ + n_ + (shared_ ? 0 : K_ * n_);
  if (big_m_.size() != n_) throw std::invalid_argument("big-M length differs from n");
}

void MasterModel::AddCut(const Cut& cut) {
  Vector row = Vector::Zero(num_cols_);
  row.head(n_) = cut.grad;
  const double rhs = cut.grad.dot(cut.xbar) - cut.fval;
  if (cut.kind == CutKind::kFeasibility) {
    dynamic_.push_back({RowKind::kCut, std::move(row), rhs});
    return;
  }
  row[AlphaCol(cut.node)] = -1.0;
  dynamic_.push_back({RowKind::kCut, std::move(row), rhs});
  if (cut.kind == CutKind::kSecondOrder) {
    quadratic_.push_back({cut.node, cut.xbar, cut.fval, cut.grad, cut.m});
  }
}

void MasterModel::Sync(const CutPool& pool) {
  for (; pool_seen_ < pool.size(); ++pool_seen_) AddCut(pool.entries()[pool_seen_].cut);
}

void MasterModel::AddSupportGuard(const BinaryVector& support) {
  Vector row = Vector::Zero(num_cols_);
  for (int c = 0; c < n_; ++c) {
    if (!support.at(c)) row[WCol(c)] = -1.0;
  }
  dynamic_.push_back({RowKind::kGuard, std::move(row), -1.0});
}

LinearProgram MasterModel::BuildLp(MasterMode mode) const {
  LinearProgram lp(num_cols_);
  for (int c = 0; c < n_; ++c) {
    lp.lower()[XCol(c)] = -big_m_[c];
    lp.upper()[XCol(c)] = big_m_[c];
    lp.lower()[WCol(c)] = 0.0;
    lp.upper()[WCol(c)] = 1.0;
  }
  for (int i = 0; i < N_; ++i) lp.objective()[AlphaCol(i)] = 1.0;
  if (!shared_) {
    for (int k = 0; k < K_ * n_; ++k) {
      lp.lower()[IntegerCol(k)] = 0.0;
      lp.upper()[IntegerCol(k)] = 1.0;
    }
  }

  Vector row(num_cols_);
  for (int c = 0; c < n_; ++c) {
    row.setZero();
    row[XCol(c)] = 1.0;
    row[WCol(c)] = -big_m_[c];
    lp.AddRow(row, RowSense::kLessEqual, 0.0);
    row[XCol(c)] = -1.0;
    lp.AddRow(row, RowSense::kLessEqual, 0.0);
  }
  if (shared_) {
    row.setZero();
    for (int c = 0; c < n_; ++c) row[WCol(c)] = 1.0;
    lp.AddRow(row, RowSense::kLessEqual, kappa_);
  } else {
    for (int j = 0; j < K_; ++j) {
      for (int c = 0; c < n_; ++c) {
        row.setZero();
        row[WCol(c)] = 1.0;
        row[ZCol(j, c)] = -1.0;
        lp.AddRow(row, RowSense::kLessEqual, 0.0);
      }
      row.setZero();
      for (int c = 0; c < n_; ++c) row[ZCol(j, c)] = 1.0;
      lp.AddRow(row, RowSense::kLessEqual, kappa_);
    }
  }
  for (int r = 0; r < polytope_.num_inequalities(); ++r) {
    row.setZero();
    row.head(n_) = polytope_.D.row(r).transpose();
    lp.AddRow(row, RowSense::kLessEqual, polytope_.d[r]);
  }
  for (int r = 0; r < polytope_.num_equalities(); ++r) {
    row.setZero();
    row.head(n_) = polytope_.A.row(r).transpose();
    lp.AddRow(row, RowSense::kEqual, polytope_.b[r]);
  }
  for (const auto& d : dynamic_) {
    if (d.kind == RowKind::kTangent && mode == MasterMode::kMilp) continue;
    lp.AddRow(d.coefs, RowSense::kLessEqual, d.rhs);
  }
  return lp;
}

int MasterModel::AddViolatedTangents(LinearProgram* lp, const Vector& sol, double tol) {
  const Vector x = sol.head(n_);
  int added = 0;
  for (const auto& q : quadratic_) {
    const double alpha = sol[AlphaCol(q.node)];
    const Vector diff = x - q.xbar;
    const double value = q.fval + q.grad.dot(diff) + 0.5 * q.m * diff.squaredNorm();
    if (value - alpha <= tol * std::max(1.0, std::abs(alpha))) continue;
    // Tangent of the quadratic at x: value + (grad + m (x - xbar))'(x' - x).
    const Vector slope = q.grad + q.m * diff;
    Vector row = Vector::Zero(num_cols_);
    row.head(n_) = slope;
    row[AlphaCol(q.node)] = -1.0;
    const double rhs = slope.dot(x) - value;
    lp->AddRow(row, RowSense::kLessEqual, rhs);
    dynamic_.push_back({RowKind::kTangent, std::move(row), rhs});
    ++num_tangents_;
    ++added;
  }
  return added;
}

bool MasterModel::Integral(const Vector& sol, double int_tol) const {
  for (int k = 0; k < num_integer(); ++k) {
    const double v = sol[IntegerCol(k)];
    if (std::min(v - std::floor(v), std::ceil(v) - v) > int_tol) return false;
  }
  return true;
}

LpResult MasterModel::SolveNode(LinearProgram* lp, MasterMode mode, const Vector& lower,
                                const Vector& upper, const LpBasis* warm,
                                const MasterOptions& options, double prune_at, int* lp_iterations) {
  Vector lo = lp->lower(), hi = lp->upper();
  for (int k = 0; k < num_integer(); ++k) {
    lo[IntegerCol(k)] = lower[k];
    hi[IntegerCol(k)] = upper[k];
  }
  LpResult res = SolveLp(*lp, lo, hi, warm);
  *lp_iterations += res.iterations;
  if (mode == MasterMode::kMiqcp) {
    for (int round = 0; round < options.max_tangent_rounds && res.status == LpStatus::kOptimal;
         ++round) {
      if (res.objective >= prune_at) break;
      if (round >= options.fractional_tangent_rounds && !Integral(res.x, options.int_tol)) break;
      if (AddViolatedTangents(lp, res.x, options.tangent_tol) == 0) break;
      LpBasis basis = res.basis;
      res = SolveLp(*lp, lo, hi, &basis);
      *lp_iterations += res.iterations;
    }
  }
  if (res.status == LpStatus::kIterationLimit) {
    throw NumericalFailure("master node relaxation hit the simplex iteration limit");
  }
  if (res.status == LpStatus::kUnbounded) {
    throw NumericalFailure("master relaxation is unbounded; every node needs an optimality cut");
  }
  return res;
}

RelaxationResult MasterModel::SolveRelaxation(const Vector& lower, const Vector& upper,
                                              MasterMode mode) {
  LinearProgram lp = BuildLp(mode);
  MasterOptions options;
  options.mode = mode;
  options.fractional_tangent_rounds = options.max_tangent_rounds;
  int iters = 0;
  LpResult res = SolveNode(&lp, mode, lower, upper, nullptr, options, kInf, &iters);
  RelaxationResult out;
  out.status = res.status;
  if (res.status != LpStatus::kOptimal) return out;
  out.value = res.objective;
  out.x = res.x.head(n_);
  out.alpha = res.x.segment(n_, N_);
  out.z.resize(num_integer());
  for (int k = 0; k < num_integer(); ++k) out.z[k] = res.x[IntegerCol(k)];
  return out;
}

namespace {

struct OpenNode {
  double bound;
  int id;
  Vector lower;
  Vector upper;
  LpBasis basis;
  Vector solution;
};

struct WorseNode {
  bool operator()(const OpenNode& a, const OpenNode& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

}  // namespace

MasterSolution MasterModel::Solve(const MasterOptions& options) {
  const MasterMode mode = quadratic_.empty() ? MasterMode::kMilp : options.mode;
  // Tangents from earlier solves are mostly slack at the new optimum and only
  // slow the simplex down; the ones that matter come back within a few rounds.
  std::erase_if(dynamic_, [](const DynamicRow& d) { return d.kind == RowKind::kTangent; });
  LinearProgram lp = BuildLp(mode);
  const int num_int = num_integer();

  MasterSolution out;
  double best = kInf;
  Vector best_solution;
  double min_pruned = kInf;
  auto threshold = [&] { return std::min(options.cutoff, best - options.abs_gap); };

  std::priority_queue<OpenNode, std::vector<OpenNode>, WorseNode> open;
  int next_id = 0;
  LpBasis& root_warm = root_basis_[mode == MasterMode::kMilp ? 0 : 1];

  // Solves a node and either records it as incumbent, prunes it, or queues it.
  auto process = [&](Vector lower, Vector upper, const LpBasis* warm) {
    LpResult res = SolveNode(&lp, mode, lower, upper, warm, options, threshold(), &out.lp_iterations);
    ++out.nodes;
    if (res.status != LpStatus::kOptimal) return;
    if (next_id == 0) root_warm = res.basis;
    const int id = next_id++;
    if (res.objective >= threshold()) {
      min_pruned = std::min(min_pruned, res.objective);
      return;
    }
    Vector ints(num_int);
    for (int k = 0; k < num_int; ++k) ints[k] = res.x[IntegerCol(k)];
    if (SelectBranchingIndex(ints, options.int_tol) < 0) {
      if (res.objective < best) {
        best = res.objective;
        best_solution = res.x;
      }
      return;
    }
    open.push(OpenNode{res.objective, id, std::move(lower), std::move(upper), res.basis, res.x});
  };

  process(Vector::Zero(num_int), Vector::Ones(num_int), root_warm.empty() ? nullptr : &root_warm);
  bool node_limit = false;
  while (!open.empty()) {
    OpenNode node = open.top();
    open.pop();
    if (node.bound >= threshold()) {
      min_pruned = std::min(min_pruned, node.bound);
      break;
    }
    if (out.nodes >= options.max_nodes) {
      min_pruned = std::min(min_pruned, node.bound);
      node_limit = true;
      break;
    }
    Vector ints(num_int);
    for (int k = 0; k < num_int; ++k) ints[k] = node.solution[IntegerCol(k)];
    const int branch = SelectBranchingIndex(ints, options.int_tol);
    Vector up_lower = node.lower;
    up_lower[branch] = 1.0;
    Vector down_upper = node.upper;
    down_upper[branch] = 0.0;
    process(node.lower, down_upper, &node.basis);
    process(up_lower, node.upper, &node.basis);
  }

  if (std::isfinite(best)) {
    out.status = node_limit ? MasterStatus::kNodeLimit : MasterStatus::kOptimal;
    out.objective = best;
    out.lower_bound = std::min(best, min_pruned);
  } else if (std::isfinite(min_pruned)) {
    out.status = node_limit ? MasterStatus::kNodeLimit : MasterStatus::kCutoff;
    out.lower_bound = min_pruned;
    return out;
  } else {
    out.status = MasterStatus::kInfeasible;
    out.lower_bound = kInf;
    return out;
  }

  out.xstar = best_solution.head(n_);
  out.alpha = best_solution.segment(n_, N_);
  out.x.assign(N_, out.xstar);
  out.ystar.assign(K_, out.xstar);
  out.z.assign(K_, BinaryVector(n_, 0));
  out.support.assign(n_, 1);
  for (int j = 0; j < K_; ++j) {
    for (int c = 0; c < n_; ++c) {
      const int v = best_solution[ZCol(j, c)] > 0.5 ? 1 : 0;
      out.z[j][c] = v;
      if (!v) out.support[c] = 0;
    }
  }
  return out;
}

namespace {

std::string Term(double coef, const std::string& name, bool first) {
  std::ostringstream os;
  os.precision(17);
  if (coef < 0) {
    os << (first ? "-" : " - ") << -coef << ' ' << name;
  } else {
    os << (first ? "" : " + ") << coef << ' ' << name;
  }
  return os.str();
}

}  // namespace

std::string MasterModel::ToLpFormat(MasterMode mode) const {
  std::vector<std::string> names(num_cols_);
  for (int c = 0; c < n_; ++c) names[XCol(c)] = "x" + std::to_string(c);
  for (int i = 0; i < N_; ++i) names[AlphaCol(i)] = "a" + std::to_string(i);
  for (int c = 0; c < n_; ++c) names[WCol(c)] = "w" + std::to_string(c);
  if (!shared_) {
    for (int j = 0; j < K_; ++j) {
      for (int c = 0; c < n_; ++c) names[ZCol(j, c)] = "z" + std::to_string(j) + "_" + std::to_string(c);
    }
  }
  LinearProgram lp = BuildLp(MasterMode::kMilp);
  std::ostringstream os;
  os.precision(17);
  os << "\\ relaxed master, " << ToString(mode) << "\nMinimize\n obj:";
  for (int i = 0; i < N_; ++i) os << Term(1.0, names[AlphaCol(i)], i == 0);
  os << "\nSubject To\n";
  auto emit_linear = [&](const Eigen::Ref<const Vector>& coefs) {
    bool first = true;
    for (int k = 0; k < num_cols_; ++k) {
      if (coefs[k] == 0.0) continue;
      os << Term(coefs[k], names[k], first);
      first = false;
    }
    if (first) os << "0 x0";
  };
  for (int r = 0; r < lp.num_rows(); ++r) {
    os << " r" << r << ": ";
    emit_linear(lp.row(r));
    os << (lp.sense(r) == RowSense::kEqual ? " = " : " <= ") << lp.rhs(r) << '\n';
  }
  if (mode == MasterMode::kMiqcp) {
    // alpha_i >= fval + grad'(x - xbar) + m/2 ||x - xbar||^2, expanded.
    int k = 0;
    for (const auto& q : quadratic_) {
      Vector lin = Vector::Zero(num_cols_);
      lin.head(n_) = q.grad - q.m * q.xbar;
      lin[AlphaCol(q.node)] = -1.0;
      const double constant = q.fval - q.grad.dot(q.xbar) + 0.5 * q.m * q.xbar.squaredNorm();
      os << " q" << k++ << ": ";
      emit_linear(lin);
      os << " + [";
      for (int c = 0; c < n_; ++c) os << (c ? " + " : " ") << 0.5 * q.m << ' ' << names[XCol(c)] << " ^2";
      os << " ] <= " << -constant << '\n';
    }
  }
  os << "Bounds\n";
  for (int c = 0; c < n_; ++c) os << ' ' << -big_m_[c] << " <= " << names[XCol(c)] << " <= " << big_m_[c] << '\n';
  for (int i = 0; i < N_; ++i) os << ' ' << names[AlphaCol(i)] << " free\n";
  for (int c = 0; c < n_; ++c) os << " 0 <= " << names[WCol(c)] << " <= 1\n";
  os << "Binaries\n";
  for (int k = 0; k < num_integer(); ++k) os << ' ' << names[IntegerCol(k)] << '\n';
  os << "End\n";
  return os.str();
}

MasterSolution SolveMaster(const CutPool& pool, const ScpInstance& inst, const Hypergraph& graph,
                           MasterMode mode, double incumbent_ub, bool shared_support) {
  MasterModel model(inst, graph, ResolveBigM(inst), shared_support);
  model.Sync(pool);
  MasterOptions options;
  options.mode = mode;
  options.cutoff = incumbent_ub;
  return model.Solve(options);
}

EnumerationResult EnumerateSupports(const ScpInstance& inst) {
  const int n = inst.n;
  const int k = std::min(inst.kappa, n);
  const Vector big_m = ResolveBigM(inst);
  EnumerationResult out;

  std::vector<const SmoothFunction*> terms;
  for (const auto& o : inst.objectives) terms.push_back(o.function.get());
  std::vector<const SmoothFunction*> constraints;
  for (const auto& g : inst.constraints) constraints.push_back(g.function.get());

  std::vector<int> pick(k);
  for (int t = 0; t < k; ++t) pick[t] = t;
  for (;;) {
    BinaryVector support(n, 0);
    for (int c : pick) support[c] = 1;

    Polytope restricted = inst.polytope;
    const int mi = restricted.num_inequalities(), me = restricted.num_equalities();
    restricted.D.conservativeResize(mi + 2 * k, n);
    restricted.d.conservativeResize(mi + 2 * k);
    restricted.A.conservativeResize(me + (n - k), n);
    restricted.b.conservativeResize(me + (n - k));
    restricted.D.bottomRows(2 * k).setZero();
    restricted.A.bottomRows(n - k).setZero();
    int ri = mi, re = me;
    for (int c = 0; c < n; ++c) {
      if (support[c]) {
        restricted.D(ri, c) = 1.0;
        restricted.d[ri++] = big_m[c];
        restricted.D(ri, c) = -1.0;
        restricted.d[ri++] = big_m[c];
      } else {
        restricted.A(re, c) = 1.0;
        restricted.b[re++] = 0.0;
      }
    }
    ProxProblem prob;
    prob.n = n;
    prob.terms = terms;
    prob.polytope = &restricted;
    prob.constraints = constraints;
    ConstrainedOptions opts;
    opts.max_outer = 200;
    ConstrainedResult r = SolveProx(prob, Vector::Zero(n), nullptr, opts);
    ++out.supports_tried;
    if (r.max_violation <= 1e-7 && r.objective < out.objective) {
      out.objective = r.objective;
      out.support = support;
      out.x = r.x;
    }

    int t = k - 1;
    while (t >= 0 && pick[t] == n - k + t) --t;
    if (t < 0) break;
    ++pick[t];
    for (int s = t + 1; s < k; ++s) pick[s] = pick[s - 1] + 1;
  }
  return out;
}

}  // namespace dipoa
