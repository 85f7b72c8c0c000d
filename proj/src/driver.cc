#include "dipoa/driver.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace dipoa {

void ValidateDipoaConfig(const DipoaConfig& cfg) {
  if (!(cfg.eps_gap > 0)) throw std::invalid_argument("eps_gap must be positive");
  if (cfg.max_iter < 0) throw std::invalid_argument("max_iter must be nonnegative");
  if (!(cfg.et_tol >= 0)) throw std::invalid_argument("et_tol must be nonnegative");
  if (!(cfg.time_limit_s > 0)) throw std::invalid_argument("time_limit_s must be positive");
  ValidateAdmmConfig(cfg.admm);
}

const char* ToString(RunStatus status) {
  switch (status) {
    case RunStatus::kOptimal:
      return "Optimal";
    case RunStatus::kIterLimit:
      return "IterLimit";
    case RunStatus::kTimeLimit:
      return "TimeLimit";
    case RunStatus::kInfeasible:
      return "Infeasible";
  }
  return "Unknown";
}

namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

BinaryVector CommonSupport(const std::vector<BinaryVector>& z, int n) {
  BinaryVector s(n, 1);
  for (const auto& zj : z) {
    for (int c = 0; c < n; ++c) {
      if (!zj[c]) s[c] = 0;
    }
  }
  return s;
}

struct Visit {
  bool infeasible = false;
  double value = kInf;
  PrimalSolution solution;
};

bool Accepted(const PrimalSolution& sol) { return sol.converged() && sol.max_violation <= 1e-6; }

}  // namespace

RunReport DipoaSolve(const ScpInstance& inst, const Hypergraph& graph, const DipoaConfig& cfg) {
  ValidateDipoaConfig(cfg);
  const auto start = Clock::now();
  const int n = inst.n;
  const int N = inst.num_nodes();
  const int K = graph.num_edges();

  RunReport rep;
  NetworkOptions net;
  net.schedule = cfg.schedule;
  Communicator comm(graph, net);
  AdmmEngine engine(inst, comm, cfg.admm);
  MasterModel model(inst, graph, engine.big_m(), cfg.shared_support);
  CutPool& pool = rep.pool;

  bool any_strong = false;
  for (const auto& o : inst.objectives) any_strong = any_strong || o.strong_convexity > 0;

  double ub = kInf, lb = -kInf;
  BinaryVector best_support;
  std::map<BinaryVector, Visit> visited;
  double guard_min = kInf;
  std::vector<BinaryVector> z(K, BinaryVector(n, 0));

  auto take_primal = [&](const PrimalSolution& sol, const BinaryVector& support, int iter) {
    const bool ok = Accepted(sol);
    rep.primal_solves.push_back({iter, support, ok, sol.consensus_objective, sol.primal_residual,
                                 sol.iterations, sol.x, sol.y});
    if (ok && sol.consensus_objective < ub) {
      ub = sol.consensus_objective;
      rep.x = sol.Consensus();
      best_support = support;
    }
  };

  // Initialization.
  std::string init_kind = "none";
  if (cfg.use_sfp) {
    const auto t = Clock::now();
    SfpResult sfp = RunSfp(engine, comm, inst);
    rep.time_primal_s += Seconds(t);
    for (auto& cut : sfp.seed_cuts) pool.Add(std::move(cut), 0, CutSource::kSfp);
    z = sfp.z0;
    lb = sfp.relax_obj;
    rep.sfp_relax_obj = sfp.relax_obj;
    rep.sfp_ub0 = sfp.ub0;
    const BinaryVector support = CommonSupport(z, n);
    take_primal(sfp.restricted, support, 0);
    // A failed restriction is not cached so the first iteration can certify
    // the support infeasible or retry it.
    if (Accepted(sfp.restricted)) {
      visited[support] = Visit{false, sfp.restricted.consensus_objective, sfp.restricted};
    }
    init_kind = "linear";
  } else {
    for (auto& zj : z) {
      for (int c = 0; c < std::min(inst.kappa, n); ++c) zj[c] = 1;
    }
  }
  double r_prev = RelativeGap(ub, lb);
  rep.bound_trace.push_back({0, ub, lb, r_prev, kInf, false, init_kind, CommonSupport(z, n)});

  bool socut_next = false;
  RunStatus status = RunStatus::kIterLimit;
  if (cfg.max_iter == 0) {
    status = RunStatus::kIterLimit;
  } else if (r_prev < cfg.eps_gap) {
    status = RunStatus::kOptimal;
  } else {
    for (int k = 1;; ++k) {
      if (k > cfg.max_iter) {
        status = RunStatus::kIterLimit;
        break;
      }
      if (Seconds(start) > cfg.time_limit_s || (cfg.cancel && cfg.cancel->load())) {
        status = RunStatus::kTimeLimit;
        break;
      }
      rep.iters = k;
      const BinaryVector support = CommonSupport(z, n);
      std::string cut_kind = "none";

      // Primal step (or a certificate that the support admits no point).
      const auto tp = Clock::now();
      const PrimalSolution* primal = nullptr;
      auto found = visited.find(support);
      if (found != visited.end()) {
        if (!found->second.infeasible) primal = &found->second.solution;
      } else {
        bool certified = false;
        if (inst.num_constraints() > 0) {
          InfeasibilityCertificate cert = DetectInfeasibility(engine, inst, z);
          if (cert.certified()) {
            certified = true;
            for (const auto& [i, h] : cert.violated) {
              pool.Add(MakeFeasibilityCut(h, cert.xbars[i], *inst.constraints[h].function), k,
                       CutSource::kInfeasibility);
            }
            pool.Add(MakeAggregateFeasibilityCut(inst.constraints, cert.solution.Consensus()), k,
                     CutSource::kInfeasibility);
            visited[support] = Visit{true, kInf, {}};
            cut_kind = "feasibility";
          }
        }
        if (!certified) {
          PrimalSolution sol = engine.SolvePrimal(z);
          take_primal(sol, support, k);
          const double value = sol.consensus_objective;
          primal = &(visited[support] = Visit{false, value, std::move(sol)}).solution;
        }
      }
      if (primal != nullptr) {
        const bool second_order = socut_next && any_strong;
        for (int i = 0; i < N; ++i) {
          const auto& obj = inst.objectives[i];
          if (second_order && obj.strong_convexity > 0) {
            pool.Add(MakeSoCut(i, primal->x[i], obj), k, CutSource::kPrimal);
          } else {
            pool.Add(MakeLinearCut(i, primal->x[i], obj), k, CutSource::kPrimal);
          }
          for (int h = 0; h < inst.num_constraints(); ++h) {
            const SmoothFunction& g = *inst.constraints[h].function;
            if (g.Value(primal->x[i]) >= -1e-6) {
              pool.Add(MakeFeasibilityCut(h, primal->x[i], g), k, CutSource::kPrimal);
            }
          }
        }
        cut_kind = second_order ? "second_order" : "linear";
      }
      rep.time_primal_s += Seconds(tp);

      // Master step; a support seen before gets a guard so the search moves on.
      const auto tm = Clock::now();
      model.Sync(pool);
      MasterOptions mopt;
      mopt.mode = pool.Count(CutKind::kSecondOrder) > 0 ? MasterMode::kMiqcp : MasterMode::kMilp;
      if (std::isfinite(ub)) mopt.cutoff = ub - 0.5 * cfg.eps_gap / 100.0 * std::max(ub, 0.001);
      if (!cfg.dump_master_dir.empty()) {
        char name[64];
        std::snprintf(name, sizeof(name), "/master_iter_%03d.lp", k);
        std::ofstream(cfg.dump_master_dir + name) << model.ToLpFormat(mopt.mode);
      }
      MasterSolution ms;
      for (;;) {
        ms = model.Solve(mopt);
        if (ms.z.empty()) break;
        auto seen = visited.find(ms.support);
        if (seen == visited.end()) break;
        const double candidate = std::max(lb, std::min(ms.lower_bound, guard_min));
        if (RelativeGap(ub, candidate) < cfg.eps_gap) break;
        model.AddSupportGuard(ms.support);
        rep.guarded_supports.push_back(ms.support);
        guard_min = std::min(guard_min, seen->second.value);
      }
      rep.time_master_s += Seconds(tm);

      lb = std::max(lb, std::min(ms.lower_bound, guard_min));
      if (lb > ub) lb = ub;
      const double r = RelativeGap(ub, lb);
      const double e = EventRatio(r_prev, r);
      const bool event = EventTriggered(r_prev, r, cfg.et_tol);
      rep.bound_trace.push_back({k, ub, lb, r, e, event, cut_kind, support});
      socut_next = event;
      r_prev = r;

      if (r < cfg.eps_gap) {
        status = RunStatus::kOptimal;
        break;
      }
      if (ms.z.empty()) {
        // No support left to try and no incumbent to certify.
        status = std::isfinite(ub) ? RunStatus::kOptimal : RunStatus::kInfeasible;
        break;
      }
      z = ms.z;
    }
  }

  rep.status = status;
  rep.objective = ub;
  rep.lower_bound = lb;
  rep.rel_gap = RelativeGap(ub, lb);
  rep.cuts_linear = pool.Count(CutKind::kLinear);
  rep.cuts_second_order = pool.Count(CutKind::kSecondOrder);
  rep.cuts_feasibility = pool.Count(CutKind::kFeasibility);
  for (int c = 0; c < static_cast<int>(best_support.size()); ++c) {
    if (best_support[c]) rep.support.push_back(c);
  }
  rep.message_digest = comm.trace_digest();
  rep.time_total_s = Seconds(start);
  return rep;
}

namespace {

nlohmann::ordered_json Number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

std::string ReportToJson(const RunReport& report, bool include_timing) {
  nlohmann::ordered_json j;
  j["status"] = ToString(report.status);
  j["objective"] = Number(report.objective);
  j["lower_bound"] = Number(report.lower_bound);
  j["rel_gap"] = Number(report.rel_gap);
  j["iters"] = report.iters;
  j["cut_counts"] = {{"linear", report.cuts_linear},
                     {"second_order", report.cuts_second_order},
                     {"feasibility", report.cuts_feasibility}};
  j["time_primal_s"] = include_timing ? report.time_primal_s : 0.0;
  j["time_master_s"] = include_timing ? report.time_master_s : 0.0;
  j["time_total_s"] = include_timing ? report.time_total_s : 0.0;
  nlohmann::ordered_json trace = nlohmann::ordered_json::array();
  for (const auto& b : report.bound_trace) {
    nlohmann::ordered_json t;
    t["iter"] = b.iter;
    t["ub"] = Number(b.ub);
    t["lb"] = Number(b.lb);
    t["r"] = Number(b.r);
    t["e"] = Number(b.e);
    t["cut_kind"] = b.cut_kind;
    trace.push_back(std::move(t));
  }
  j["bound_trace"] = std::move(trace);
  nlohmann::ordered_json sol;
  nlohmann::ordered_json xs = nlohmann::ordered_json::array();
  for (Eigen::Index c = 0; c < report.x.size(); ++c) xs.push_back(Number(report.x[c]));
  sol["x"] = std::move(xs);
  sol["support"] = report.support;
  j["solution"] = std::move(sol);
  return j.dump(2);
}

std::string BoundTraceCsv(const RunReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << "iter,ub,lb,r,e,cut_kind,support\n";
  for (const auto& b : report.bound_trace) {
    os << b.iter << ',' << b.ub << ',' << b.lb << ',' << b.r << ',' << b.e << ',' << b.cut_kind
       << ',';
    bool first = true;
    for (int c = 0; c < static_cast<int>(b.support.size()); ++c) {
      if (!b.support[c]) continue;
      os << (first ? "" : " ") << c;
      first = false;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace dipoa
