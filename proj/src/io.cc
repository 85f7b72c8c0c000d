#include "dipoa/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace dipoa {

namespace {

using nlohmann::json;

Matrix MatrixFromJson(const json& j, int cols) {
  if (j.is_null() || j.empty()) return Matrix(0, cols);
  const int rows = static_cast<int>(j.size());
  Matrix out(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (static_cast<int>(j[r].size()) != cols) throw std::invalid_argument("matrix row has wrong length");
    for (int c = 0; c < cols; ++c) out(r, c) = j[r][c].get<double>();
  }
  return out;
}

Vector VectorFromJson(const json& j) {
  if (j.is_null()) return Vector(0);
  Vector out(j.size());
  for (std::size_t c = 0; c < j.size(); ++c) out[c] = j[c].get<double>();
  return out;
}

json ToJson(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json ToJson(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(ToJson(Vector(m.row(r).transpose())));
  return out;
}

std::shared_ptr<QuadraticFunction> QuadraticFromJson(const json& j, int n) {
  Matrix Q = MatrixFromJson(j.at("Q"), n);
  if (Q.rows() != n) throw std::invalid_argument("Q must be n x n");
  Vector q = j.contains("q") ? VectorFromJson(j["q"]) : Vector(Vector::Zero(n));
  if (q.size() != n) throw std::invalid_argument("q must have length n");
  return std::make_shared<QuadraticFunction>(std::move(Q), std::move(q), j.value("d", 0.0));
}

ScpInstance ParseInstance(const json& j) {
  ScpInstance inst;
  inst.n = j.at("n").get<int>();
  inst.kappa = j.at("kappa").get<int>();
  const int n = inst.n;
  if (n < 1) throw std::invalid_argument("n must be positive");

  if (j.contains("polytope") && !j["polytope"].is_null()) {
    const json& p = j["polytope"];
    inst.polytope.D = MatrixFromJson(p.value("D", json::array()), n);
    inst.polytope.d = VectorFromJson(p.value("d", json::array()));
    inst.polytope.A = MatrixFromJson(p.value("A", json::array()), n);
    inst.polytope.b = VectorFromJson(p.value("b", json::array()));
    if (inst.polytope.d.size() != inst.polytope.D.rows() ||
        inst.polytope.b.size() != inst.polytope.A.rows()) {
      throw std::invalid_argument("polytope right-hand side length mismatch");
    }
  } else {
    inst.polytope = Polytope::Free(n);
  }

  for (const json& o : j.at("objectives")) {
    const std::string kind = o.at("kind").get<std::string>();
    ObjectiveOracle oracle;
    if (kind == "quadratic") {
      auto f = QuadraticFromJson(o, n);
      oracle.strong_convexity = o.contains("m") ? o["m"].get<double>() : f->MinEigenvalue();
      oracle.function = std::move(f);
    } else if (kind == "logistic") {
      Matrix X = MatrixFromJson(o.at("X"), n);
      Vector labels = VectorFromJson(o.at("labels"));
      if (labels.size() != X.rows()) throw std::invalid_argument("labels length mismatch");
      const double lambda = o.at("lambda").get<double>();
      oracle.strong_convexity = o.value("m", lambda);
      oracle.function = std::make_shared<LogisticFunction>(std::move(X), std::move(labels), lambda);
    } else {
      throw std::invalid_argument("unknown objective kind: " + kind);
    }
    inst.objectives.push_back(std::move(oracle));
  }
  if (j.contains("N") && j["N"].get<int>() != inst.num_nodes()) {
    throw std::invalid_argument("N does not match the number of objectives");
  }
  if (j.contains("constraints")) {
    for (const json& c : j["constraints"]) {
      if (c.at("kind").get<std::string>() != "quadratic") {
        throw std::invalid_argument("constraints must be quadratic");
      }
      inst.constraints.push_back({QuadraticFromJson(c, n)});
    }
  }
  if (j.contains("big_m") && !j["big_m"].is_null()) {
    inst.big_m = VectorFromJson(j["big_m"]);
    if (inst.big_m->size() != n) throw std::invalid_argument("big_m must have length n");
  }
  return inst;
}

}  // namespace

// Malformed documents surface as invalid_argument whatever the JSON layer threw.
ScpInstance InstanceFromJson(const std::string& text) {
  try {
    return ParseInstance(json::parse(text));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("instance JSON: ") + e.what());
  }
}

std::string InstanceToJson(const ScpInstance& inst) {
  nlohmann::ordered_json j;
  j["n"] = inst.n;
  j["N"] = inst.num_nodes();
  j["kappa"] = inst.kappa;
  j["polytope"] = {{"D", ToJson(inst.polytope.D)},
                   {"d", ToJson(inst.polytope.d)},
                   {"A", ToJson(inst.polytope.A)},
                   {"b", ToJson(inst.polytope.b)}};
  nlohmann::ordered_json objectives = nlohmann::ordered_json::array();
  for (const auto& o : inst.objectives) {
    nlohmann::ordered_json e;
    if (auto* q = dynamic_cast<const QuadraticFunction*>(o.function.get())) {
      e["kind"] = "quadratic";
      e["Q"] = ToJson(q->Q());
      e["q"] = ToJson(q->q());
      e["d"] = q->d();
    } else if (auto* l = dynamic_cast<const LogisticFunction*>(o.function.get())) {
      e["kind"] = "logistic";
      e["X"] = ToJson(l->X());
      e["labels"] = ToJson(l->labels());
      e["lambda"] = l->lambda();
    } else {
      throw std::invalid_argument("objective oracle cannot be serialized");
    }
    e["m"] = o.strong_convexity;
    objectives.push_back(std::move(e));
  }
  j["objectives"] = std::move(objectives);
  nlohmann::ordered_json constraints = nlohmann::ordered_json::array();
  for (const auto& c : inst.constraints) {
    auto* q = dynamic_cast<const QuadraticFunction*>(c.function.get());
    if (q == nullptr) throw std::invalid_argument("constraint oracle cannot be serialized");
    constraints.push_back({{"kind", "quadratic"}, {"Q", ToJson(q->Q())}, {"q", ToJson(q->q())}, {"d", q->d()}});
  }
  j["constraints"] = std::move(constraints);
  j["big_m"] = inst.big_m ? nlohmann::ordered_json(ToJson(*inst.big_m)) : nlohmann::ordered_json(nullptr);
  return j.dump(2);
}

namespace {

void ReadConfig(const json& j, DipoaConfig* out) {
  DipoaConfig& cfg = *out;
  cfg.use_sfp = j.value("use_sfp", cfg.use_sfp);
  cfg.eps_gap = j.value("eps_gap", cfg.eps_gap);
  cfg.et_tol = j.value("et_tol", cfg.et_tol);
  cfg.max_iter = j.value("max_iter", cfg.max_iter);
  cfg.time_limit_s = j.value("time_limit_s", cfg.time_limit_s);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.shared_support = j.value("shared_support", cfg.shared_support);
  if (j.contains("schedule")) cfg.schedule = ParseSchedule(j["schedule"].get<std::string>());
  if (j.contains("admm")) {
    const json& a = j["admm"];
    cfg.admm.rho0 = a.value("rho0", cfg.admm.rho0);
    cfg.admm.relax_alpha = a.value("relax_alpha", cfg.admm.relax_alpha);
    cfg.admm.mu = a.value("mu", cfg.admm.mu);
    cfg.admm.tau = a.value("tau", cfg.admm.tau);
    cfg.admm.eps_primal = a.value("eps_primal", cfg.admm.eps_primal);
    cfg.admm.eps_dual = a.value("eps_dual", cfg.admm.eps_dual);
    cfg.admm.max_iter = a.value("max_iter", cfg.admm.max_iter);
    cfg.admm.adapt_iterations = a.value("adapt_iterations", cfg.admm.adapt_iterations);
    cfg.admm.warm_start = a.value("warm_start", cfg.admm.warm_start);
  }
}

}  // namespace

DipoaConfig ConfigFromJson(const std::string& text, DipoaConfig cfg) {
  try {
    ReadConfig(json::parse(text), &cfg);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config JSON: ") + e.what());
  }
  ValidateDipoaConfig(cfg);
  return cfg;
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void WriteTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace dipoa
