#ifndef DIPOA_DRIVER_HPP_
#define DIPOA_DRIVER_HPP_

#include <atomic>
#include <cstdint>
#include <string>
#include <vector>

#include "dipoa/cuts.hpp"
#include "dipoa/heuristics.hpp"
#include "dipoa/master.hpp"
#include "dipoa/network.hpp"
#include "dipoa/problem.hpp"
#include "dipoa/rhadmm.hpp"

namespace dipoa {

struct DipoaConfig {
  bool use_sfp = true;
  double eps_gap = 0.1;  // percent
  double et_tol = 0.1;
  int max_iter = 200;    // 0 stops before the first iteration
  double time_limit_s = 600.0;
  AdmmConfig admm;
  std::uint64_t seed = 0;
  Schedule schedule = Schedule::kSequential;
  bool shared_support = true;  // one binary vector for all LFCs in the master
  std::string dump_master_dir;  // one LP file per iteration when set
  const std::atomic<bool>* cancel = nullptr;
};

void ValidateDipoaConfig(const DipoaConfig& cfg);

enum class RunStatus { kOptimal, kIterLimit, kTimeLimit, kInfeasible };

const char* ToString(RunStatus status);

struct BoundRecord {
  int iter = 0;
  double ub = kInf;
  double lb = -kInf;
  double r = kInf;
  double e = kInf;        // not finite before the first comparison
  bool event = false;     // trigger outcome, drives the next iteration's cuts
  std::string cut_kind;   // cuts added this iteration
  BinaryVector support;   // support whose primal problem was used
};

struct PrimalRecord {
  int iter = 0;
  BinaryVector support;
  bool accepted = false;  // converged with consensus and feasibility met
  double objective = kInf;
  double primal_residual = kInf;
  int admm_iterations = 0;
  std::vector<Vector> x;  // per node
  std::vector<Vector> y;  // per LFC
};

struct RunReport {
  RunStatus status = RunStatus::kIterLimit;
  double objective = kInf;
  double lower_bound = -kInf;
  double rel_gap = kInf;
  int iters = 0;
  int cuts_linear = 0;
  int cuts_second_order = 0;
  int cuts_feasibility = 0;
  double time_primal_s = 0.0;
  double time_master_s = 0.0;
  double time_total_s = 0.0;
  std::vector<BoundRecord> bound_trace;
  Vector x;
  std::vector<int> support;  // 0-based indices

  // Diagnostics kept out of the JSON report.
  CutPool pool;
  std::vector<PrimalRecord> primal_solves;
  std::vector<BinaryVector> guarded_supports;
  double sfp_relax_obj = -kInf;
  double sfp_ub0 = kInf;
  std::uint64_t message_digest = 0;
};

RunReport DipoaSolve(const ScpInstance& inst, const Hypergraph& graph, const DipoaConfig& cfg);

// Report as JSON with keys status, objective, lower_bound, rel_gap, iters,
// cut_counts, time_primal_s, time_master_s, time_total_s, bound_trace,
// solution. Non-finite numbers become null. With include_timing false the
// time fields are written as 0 so repeated runs compare byte for byte.
std::string ReportToJson(const RunReport& report, bool include_timing = true);
// bound_trace as CSV: iter,ub,lb,r,e,cut_kind,support.
std::string BoundTraceCsv(const RunReport& report);

}  // namespace dipoa

#endif  // DIPOA_DRIVER_HPP_
