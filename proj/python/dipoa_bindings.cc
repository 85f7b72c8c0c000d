#include <optional>
#include <string>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dipoa/apps.hpp"
#include "dipoa/cuts.hpp"
#include "dipoa/driver.hpp"
#include "dipoa/heuristics.hpp"
#include "dipoa/io.hpp"
#include "dipoa/master.hpp"

namespace py = pybind11;

namespace {

dipoa::Hypergraph TopologyFor(const dipoa::ScpInstance& inst, std::optional<int> N, int K,
                              const std::optional<std::string>& topology_json) {
  if (topology_json) return dipoa::TopologyFromJson(*topology_json);
  return dipoa::Hypergraph::Blocks(N.value_or(inst.num_nodes()), K);
}

std::string Solve(const std::string& instance_json, std::optional<int> N, int K,
                  const std::optional<std::string>& topology_json,
                  const std::optional<std::string>& config_json, bool include_timing) {
  const dipoa::ScpInstance inst = dipoa::InstanceFromJson(instance_json);
  const dipoa::DipoaConfig cfg = config_json ? dipoa::ConfigFromJson(*config_json) : dipoa::DipoaConfig{};
  const dipoa::Hypergraph graph = TopologyFor(inst, N, K, topology_json);
  if (graph.num_nodes != inst.num_nodes()) {
    throw std::invalid_argument("topology node count differs from the instance");
  }
  return dipoa::ReportToJson(dipoa::DipoaSolve(inst, graph, cfg), include_timing);
}

py::dict Enumerate(const std::string& instance_json) {
  const dipoa::EnumerationResult r = dipoa::EnumerateSupports(dipoa::InstanceFromJson(instance_json));
  py::dict out;
  out["objective"] = r.objective;
  out["support"] = r.support;
  out["x"] = r.x;
  out["supports_tried"] = r.supports_tried;
  return out;
}

py::list Validate(const std::string& instance_json, std::uint64_t seed) {
  py::list out;
  for (const auto& f : dipoa::ValidateInstance(dipoa::InstanceFromJson(instance_json), seed).findings) {
    out.append(py::make_tuple(f.code, f.message));
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cardinality-constrained convex optimization over a network of nodes";

  py::register_exception<dipoa::Error>(m, "DipoaError", PyExc_RuntimeError);

  m.def("solve", &Solve, py::arg("instance_json"), py::arg("N") = std::nullopt, py::arg("K") = 1,
        py::arg("topology_json") = std::nullopt, py::arg("config_json") = std::nullopt,
        py::arg("include_timing") = true, py::call_guard<py::gil_scoped_release>(),
        "Solve an instance given as JSON text; returns the run report as JSON text.");
  m.def("gen_dslr",
        [](int N, int p_total, int n, int kappa_true, double lam, std::uint64_t seed) {
          return dipoa::InstanceToJson(dipoa::GenDslr(N, p_total, n, kappa_true, lam, seed));
        },
        py::arg("N"), py::arg("p_total"), py::arg("n"), py::arg("kappa_true"), py::arg("lam") = 0.1,
        py::arg("seed") = 0, "Sparse logistic regression instance as JSON text.");
  m.def("gen_sqcqp",
        [](int N, int n, int m_cons, double density, std::uint64_t seed) {
          return dipoa::InstanceToJson(dipoa::GenSqcqp(N, n, m_cons, density, seed));
        },
        py::arg("N"), py::arg("n"), py::arg("m") = 1, py::arg("density") = 0.5, py::arg("seed") = 0,
        "Sparse QCQP instance as JSON text.");
  m.def("run_benchmark",
        [](const std::string& scenario_json, const std::string& fmt, bool include_timing) {
          const auto rows = dipoa::RunBenchmark(scenario_json);
          if (fmt == "csv") return dipoa::BenchmarkCsv(rows, include_timing);
          if (fmt == "json") return dipoa::BenchmarkJson(rows, include_timing);
          throw std::invalid_argument("format must be csv or json");
        },
        py::arg("scenario_json"), py::arg("fmt") = "csv", py::arg("include_timing") = true,
        py::call_guard<py::gil_scoped_release>());
  m.def("enumerate_supports", &Enumerate, py::arg("instance_json"),
        "Exact optimum by enumerating every support of size kappa.");
  m.def("validate_instance", &Validate, py::arg("instance_json"), py::arg("seed") = 0,
        "List of (code, message) findings.");
  m.def("project_sparsity", &dipoa::ProjectSparsity, py::arg("y"), py::arg("kappa"));
  m.def("binaries_from_support", &dipoa::BinariesFromSupport, py::arg("y"));
  m.def("relative_gap", &dipoa::RelativeGap, py::arg("ub"), py::arg("lb"));
  m.def("event_triggered", &dipoa::EventTriggered, py::arg("r_prev"), py::arg("r_cur"),
        py::arg("tol") = 0.1);
  m.def("topology_blocks",
        [](int N, int K) { return dipoa::TopologyToJson(dipoa::Hypergraph::Blocks(N, K)); },
        py::arg("N"), py::arg("K"), "Block topology as JSON text.");
}
