#include "dipoa/apps.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "dipoa/io.hpp"
#include "json.hpp"

namespace dipoa {

double DslrLabel(double score) {
  const double p = 1.0 / (1.0 + std::exp(-score));
  return p >= 0.5 ? 1.0 : -1.0;
}

ScpInstance GenDslr(int N, int p_total, int n, int kappa_true, double lambda, std::uint64_t seed,
                    Vector* theta_true) {
  if (N < 1 || n < 1) throw std::invalid_argument("N and n must be positive");
  if (p_total < N) throw std::invalid_argument("p_total must be at least N");
  if (kappa_true < 1 || kappa_true > n) throw std::invalid_argument("kappa_true must be in [1, n]");
  if (!(lambda > 0)) throw std::invalid_argument("lambda must be positive");
  Rng rng(seed);

  Matrix X(p_total, n);
  for (int r = 0; r < p_total; ++r) {
    for (int c = 0; c < n; ++c) X(r, c) = rng.Normal();
  }
  for (int c = 0; c < n; ++c) {
    X.col(c).array() -= X.col(c).mean();
    const double norm = X.col(c).norm();
    if (norm > 0) X.col(c) /= norm;
  }

  // Planted support: a uniformly random kappa_true-subset.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int c = n - 1; c > 0; --c) std::swap(order[c], order[rng.Index(c + 1)]);
  Vector theta = Vector::Zero(n);
  for (int k = 0; k < kappa_true; ++k) {
    double v = 0.0;
    while (v == 0.0) v = rng.Uniform(-10.0, 10.0);
    theta[order[k]] = v;
  }
  Vector labels(p_total);
  for (int r = 0; r < p_total; ++r) labels[r] = DslrLabel(X.row(r).dot(theta));

  ScpInstance inst;
  inst.n = n;
  inst.kappa = kappa_true;
  for (int i = 0; i < N; ++i) {
    const int lo = static_cast<int>(static_cast<long long>(i) * p_total / N);
    const int hi = static_cast<int>(static_cast<long long>(i + 1) * p_total / N);
    auto f = std::make_shared<LogisticFunction>(X.middleRows(lo, hi - lo), labels.segment(lo, hi - lo),
                                                lambda);
    inst.objectives.push_back({std::move(f), lambda});
  }
  const double bound = std::sqrt(2.0 * p_total * std::log(2.0) / (N * lambda));
  inst.polytope = Polytope::Box(Vector::Constant(n, -bound), Vector::Constant(n, bound));
  inst.big_m = Vector::Constant(n, bound);
  if (theta_true != nullptr) *theta_true = theta;
  return inst;
}

ScpInstance GenSqcqp(int N, int n, int m, double density, std::uint64_t seed) {
  if (N < 1 || n < 1) throw std::invalid_argument("N and n must be positive");
  if (m < 0) throw std::invalid_argument("m must be nonnegative");
  if (!(density > 0 && density <= 1)) throw std::invalid_argument("density must be in (0, 1]");
  Rng rng(seed);
  auto sparse_factor = [&]() {
    Matrix L = Matrix::Zero(n, n);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        if (rng.Uniform() < density) L(r, c) = rng.Normal();
      }
    }
    return L;
  };

  ScpInstance inst;
  inst.n = n;
  inst.kappa = (n + 1) / 2;
  for (int i = 0; i < N; ++i) {
    const Matrix L = sparse_factor();
    Matrix Q = L * L.transpose() + 0.1 * Matrix::Identity(n, n);
    Vector q = 3.0 * rng.NormalVector(n);
    auto f = std::make_shared<QuadraticFunction>(std::move(Q), std::move(q), 0.0);
    const double modulus = f->MinEigenvalue();
    inst.objectives.push_back({std::move(f), modulus});
  }
  for (int h = 0; h < m; ++h) {
    const Matrix B = sparse_factor();
    Matrix P = B * B.transpose() / n;
    Vector c = rng.NormalVector(n);
    const double r = -rng.Uniform(0.5, 2.0);
    inst.constraints.push_back({std::make_shared<QuadraticFunction>(std::move(P), std::move(c), r)});
  }
  inst.polytope = Polytope::Box(Vector::Constant(n, -5.0), Vector::Constant(n, 5.0));
  return inst;
}

int KappaFromPercent(double pct, int n) {
  return std::max(1, static_cast<int>(std::ceil(pct * n / 100.0 - 1e-12)));
}

namespace {

using nlohmann::json;
using Cell = std::map<std::string, double>;

std::vector<Cell> ExpandGrid(const json& grid) {
  std::vector<Cell> cells{{}};
  for (auto it = grid.begin(); it != grid.end(); ++it) {
    std::vector<double> values;
    if (it.value().is_array()) {
      for (const auto& v : it.value()) values.push_back(v.get<double>());
    } else {
      values.push_back(it.value().get<double>());
    }
    std::vector<Cell> next;
    for (const auto& cell : cells) {
      for (double v : values) {
        Cell c = cell;
        c[it.key()] = v;
        next.push_back(std::move(c));
      }
    }
    cells = std::move(next);
  }
  return cells;
}

double Get(const Cell& cell, const std::string& key, double fallback) {
  auto it = cell.find(key);
  return it == cell.end() ? fallback : it->second;
}

}  // namespace

std::vector<BenchRow> RunBenchmark(const std::string& scenario_json) {
  const json scenario = json::parse(scenario_json);
  const std::string app = scenario.at("app").get<std::string>();
  if (app != "dslr" && app != "sqcqp") throw std::invalid_argument("app must be dslr or sqcqp");
  const DipoaConfig cfg =
      scenario.contains("config") ? ConfigFromJson(scenario["config"].dump()) : DipoaConfig{};

  std::vector<BenchRow> rows;
  for (const Cell& cell : ExpandGrid(scenario.value("grid", json::object()))) {
    BenchRow row;
    row.app = app;
    row.N = static_cast<int>(Get(cell, "N", app == "dslr" ? 4 : 2));
    row.K = static_cast<int>(Get(cell, "K", 1));
    row.n = static_cast<int>(Get(cell, "n", 8));
    row.seed = static_cast<std::uint64_t>(Get(cell, "seed", static_cast<double>(cfg.seed)));
    try {
      ScpInstance inst;
      if (app == "dslr") {
        row.samples = static_cast<int>(Get(cell, "p_total", 200));
        inst = GenDslr(row.N, row.samples, row.n, static_cast<int>(Get(cell, "kappa_true", 3)),
                       Get(cell, "lambda", 0.1), row.seed);
      } else {
        inst = GenSqcqp(row.N, row.n, static_cast<int>(Get(cell, "m", 1)), Get(cell, "density", 0.5),
                        row.seed);
      }
      if (cell.count("kappa")) inst.kappa = static_cast<int>(cell.at("kappa"));
      if (cell.count("kappa_pct")) inst.kappa = KappaFromPercent(cell.at("kappa_pct"), row.n);
      row.kappa = inst.kappa;
      const Hypergraph graph = Hypergraph::Blocks(row.N, row.K);
      DipoaConfig run_cfg = cfg;
      run_cfg.seed = row.seed;
      const RunReport rep = DipoaSolve(inst, graph, run_cfg);
      row.status = ToString(rep.status);
      row.objective = rep.objective;
      row.rel_gap = rep.rel_gap;
      row.total_cuts = rep.cuts_linear + rep.cuts_second_order + rep.cuts_feasibility;
      row.iters = rep.iters;
      row.time_primal_s = rep.time_primal_s;
      row.time_master_s = rep.time_master_s;
      row.time_total_s = rep.time_total_s;
    } catch (const std::exception& e) {
      row.status = "error";
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string BenchmarkCsv(const std::vector<BenchRow>& rows, bool include_timing) {
  std::ostringstream os;
  os.precision(10);
  os << "app,N,K,n,kappa,samples,seed,status,objective,rel_gap_pct,total_cuts,iters,"
        "time_primal_s,time_master_s,time_total_s,error\n";
  for (const auto& r : rows) {
    std::string error = r.error;
    for (char& ch : error) {
      if (ch == ',' || ch == '\n') ch = ' ';
    }
    os << r.app << ',' << r.N << ',' << r.K << ',' << r.n << ',' << r.kappa << ',' << r.samples << ','
       << r.seed << ',' << r.status << ',' << r.objective << ',' << r.rel_gap << ',' << r.total_cuts
       << ',' << r.iters << ',' << (include_timing ? r.time_primal_s : 0.0) << ','
       << (include_timing ? r.time_master_s : 0.0) << ',' << (include_timing ? r.time_total_s : 0.0)
       << ',' << error << '\n';
  }
  return os.str();
}

std::string BenchmarkJson(const std::vector<BenchRow>& rows, bool include_timing) {
  auto number = [](double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr); };
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["app"] = r.app;
    j["N"] = r.N;
    j["K"] = r.K;
    j["n"] = r.n;
    j["kappa"] = r.kappa;
    j["samples"] = r.samples;
    j["seed"] = r.seed;
    j["status"] = r.status;
    j["objective"] = number(r.objective);
    j["rel_gap"] = number(r.rel_gap);
    j["total_cuts"] = r.total_cuts;
    j["iters"] = r.iters;
    j["time_primal_s"] = include_timing ? r.time_primal_s : 0.0;
    j["time_master_s"] = include_timing ? r.time_master_s : 0.0;
    j["time_total_s"] = include_timing ? r.time_total_s : 0.0;
    if (!r.error.empty()) j["error"] = r.error;
    out.push_back(std::move(j));
  }
  return out.dump(2);
}

}  // namespace dipoa
