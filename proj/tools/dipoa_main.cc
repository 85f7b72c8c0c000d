#include <atomic>
#include <csignal>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "dipoa/apps.hpp"
#include "dipoa/driver.hpp"
#include "dipoa/io.hpp"

namespace {

std::atomic<bool> g_interrupted{false};

void OnInterrupt(int) { g_interrupted.store(true); }

void Emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  } else {
    dipoa::WriteTextFile(out_path, text);
  }
}

int ExitCode(dipoa::RunStatus status) {
  switch (status) {
    case dipoa::RunStatus::kOptimal:
      return 0;
    case dipoa::RunStatus::kInfeasible:
      return 2;
    default:
      return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cardinality-constrained convex optimization over a network of nodes"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "Solve an instance file and print the run report");
  std::string instance_path, topology_path, config_path, dump_dir, trace_path, out_path;
  std::string format = "json", schedule = "sequential";
  std::optional<int> nodes;
  int lfcs = 1;
  double eps_gap = 0.1, et_tol = 0.1, time_limit = 600.0;
  int max_iter = 200;
  std::uint64_t seed = 0;
  bool no_sfp = false, no_timing = false;
  solve->add_option("instance", instance_path, "Instance JSON file")->required();
  solve->add_option("--topology", topology_path, "Topology JSON file");
  solve->add_option("--N", nodes, "Node count for the block topology (default: instance N)");
  solve->add_option("--K", lfcs, "LFC count for the block topology")->capture_default_str();
  solve->add_option("--config", config_path, "JSON file with solver settings");
  solve->add_option("--eps-gap", eps_gap, "Relative gap tolerance in percent")->capture_default_str();
  solve->add_option("--et-tol", et_tol, "Event-trigger tolerance")->capture_default_str();
  solve->add_flag("--no-sfp", no_sfp, "Skip the sparse feasibility pump initialization");
  solve->add_option("--max-iter", max_iter, "Outer iteration limit")->capture_default_str();
  solve->add_option("--time-limit", time_limit, "Wall-clock limit in seconds")->capture_default_str();
  solve->add_option("--seed", seed, "Random seed")->capture_default_str();
  solve->add_option("--schedule", schedule, "Worker schedule: sequential | threaded | auto")
      ->capture_default_str();
  solve->add_option("--dump-master", dump_dir, "Directory for per-iteration master LP files");
  solve->add_option("--trace", trace_path, "Write the bound trace as CSV to this file");
  solve->add_option("--out", out_path, "Report file (default: stdout)");
  solve->add_option("--format", format, "Report format: json | csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  solve->add_flag("--no-timing", no_timing, "Write zero timings so reports compare byte for byte");

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a random instance file");
  std::string gen_app, gen_out;
  int gen_nodes = 2, gen_n = 8, gen_p = 200, gen_kappa_true = 3, gen_m = 1;
  std::optional<int> gen_kappa;
  double gen_lambda = 0.1, gen_density = 0.5;
  std::uint64_t gen_seed = 0;
  gen->add_option("app", gen_app, "dslr | sqcqp")->required()->check(CLI::IsMember({"dslr", "sqcqp"}));
  gen->add_option("--N", gen_nodes, "Node count")->capture_default_str();
  gen->add_option("--n", gen_n, "Dimension")->capture_default_str();
  gen->add_option("--p-total", gen_p, "Total samples (dslr)")->capture_default_str();
  gen->add_option("--kappa-true", gen_kappa_true, "Planted nonzeros (dslr)")->capture_default_str();
  gen->add_option("--lambda", gen_lambda, "Ridge weight (dslr)")->capture_default_str();
  gen->add_option("--m", gen_m, "Constraint count (sqcqp)")->capture_default_str();
  gen->add_option("--density", gen_density, "Factor density (sqcqp)")->capture_default_str();
  gen->add_option("--kappa", gen_kappa, "Sparsity bound (overrides the generator default)");
  gen->add_option("--seed", gen_seed, "Random seed")->capture_default_str();
  gen->add_option("--out", gen_out, "Output file (default: stdout)");

  // bench
  auto* bench = app.add_subcommand("bench", "Run a benchmark scenario");
  std::string scenario_path, bench_out, bench_format = "csv";
  bench->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  bench->add_option("--out", bench_out, "Output file (default: stdout)");
  bench->add_option("--format", bench_format, "json | csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (*solve) {
      const dipoa::ScpInstance inst = dipoa::InstanceFromJson(dipoa::ReadTextFile(instance_path));
      dipoa::DipoaConfig cfg;
      if (!config_path.empty()) cfg = dipoa::ConfigFromJson(dipoa::ReadTextFile(config_path));
      if (solve->count("--eps-gap")) cfg.eps_gap = eps_gap;
      if (solve->count("--et-tol")) cfg.et_tol = et_tol;
      if (solve->count("--max-iter")) cfg.max_iter = max_iter;
      if (solve->count("--time-limit")) cfg.time_limit_s = time_limit;
      if (solve->count("--seed")) cfg.seed = seed;
      if (solve->count("--schedule")) cfg.schedule = dipoa::ParseSchedule(schedule);
      if (no_sfp) cfg.use_sfp = false;
      cfg.dump_master_dir = dump_dir;
      cfg.cancel = &g_interrupted;

      const dipoa::Hypergraph graph =
          topology_path.empty()
              ? dipoa::Hypergraph::Blocks(nodes.value_or(inst.num_nodes()), lfcs)
              : dipoa::TopologyFromJson(dipoa::ReadTextFile(topology_path));
      if (graph.num_nodes != inst.num_nodes()) {
        std::cerr << "topology has " << graph.num_nodes << " nodes but the instance has "
                  << inst.num_nodes() << " objectives\n";
        return 1;
      }
      const dipoa::ValidationReport validation = dipoa::ValidateInstance(inst, cfg.seed);
      for (const auto& f : validation.findings) {
        std::cerr << "warning: " << f.code << ": " << f.message << '\n';
      }

      std::signal(SIGINT, OnInterrupt);
      const dipoa::RunReport report = dipoa::DipoaSolve(inst, graph, cfg);
      std::signal(SIGINT, SIG_DFL);

      if (!trace_path.empty()) dipoa::WriteTextFile(trace_path, dipoa::BoundTraceCsv(report));
      Emit(format == "json" ? dipoa::ReportToJson(report, !no_timing) : dipoa::BoundTraceCsv(report),
           out_path);
      return ExitCode(report.status);
    }
    if (*gen) {
      dipoa::ScpInstance inst =
          gen_app == "dslr"
              ? dipoa::GenDslr(gen_nodes, gen_p, gen_n, gen_kappa_true, gen_lambda, gen_seed)
              : dipoa::GenSqcqp(gen_nodes, gen_n, gen_m, gen_density, gen_seed);
      if (gen_kappa) inst.kappa = *gen_kappa;
      Emit(dipoa::InstanceToJson(inst), gen_out);
      return 0;
    }
    if (*bench) {
      const auto rows = dipoa::RunBenchmark(dipoa::ReadTextFile(scenario_path));
      Emit(bench_format == "csv" ? dipoa::BenchmarkCsv(rows) : dipoa::BenchmarkJson(rows), bench_out);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
