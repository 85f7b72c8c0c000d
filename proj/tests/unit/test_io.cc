#include <cstdio>

#include "doctest.h"
#include "dipoa/apps.hpp"
#include "dipoa/io.hpp"
#include "json.hpp"
#include "../support/builders.hpp"

using namespace dipoa;

namespace {

void CheckSameOracles(const ScpInstance& a, const ScpInstance& b, std::uint64_t seed) {
  REQUIRE(a.n == b.n);
  REQUIRE(a.kappa == b.kappa);
  REQUIRE(a.num_nodes() == b.num_nodes());
  REQUIRE(a.num_constraints() == b.num_constraints());
  Rng rng(seed);
  for (int t = 0; t < 20; ++t) {
    const Vector x = rng.NormalVector(a.n);
    for (int i = 0; i < a.num_nodes(); ++i) {
      CHECK(a.objectives[i].function->Value(x) == b.objectives[i].function->Value(x));
      CHECK(a.objectives[i].strong_convexity == b.objectives[i].strong_convexity);
    }
    for (int h = 0; h < a.num_constraints(); ++h)
      CHECK(a.constraints[h].function->Value(x) == b.constraints[h].function->Value(x));
  }
  CHECK(a.polytope.D == b.polytope.D);
  CHECK(a.polytope.d == b.polytope.d);
  CHECK(a.big_m.has_value() == b.big_m.has_value());
}

}  // namespace

TEST_CASE("bundled fixture loads") {
  const ScpInstance inst = InstanceFromJson(ReadTextFile(DIPOA_FIXTURE_DIR "/tiny_quadratic.json"));
  CHECK(inst.n == 3);
  CHECK(inst.num_nodes() == 2);
  CHECK(inst.kappa == 1);
  CHECK_FALSE(inst.big_m.has_value());
  CHECK(inst.objectives[0].strong_convexity == doctest::Approx(2));
  // f1 + f2 at (2, 0, 0): (1 + 4 + 0) + (1 + 0 + 1) = 7.
  CHECK(inst.TotalObjective(builders::Vec({2, 0, 0})) == doctest::Approx(7));
}

TEST_CASE("quadratic instances round trip") {
  const ScpInstance inst = GenSqcqp(3, 5, 2, 0.5, 9);
  const std::string text = InstanceToJson(inst);
  const ScpInstance back = InstanceFromJson(text);
  CheckSameOracles(inst, back, 1);
  CHECK(InstanceToJson(back) == text);
}

TEST_CASE("logistic instances round trip") {
  const ScpInstance inst = GenDslr(2, 40, 4, 2, 0.1, 3);
  const ScpInstance back = InstanceFromJson(InstanceToJson(inst));
  CheckSameOracles(inst, back, 2);
  CHECK(back.big_m.has_value());
  CHECK(back.objectives[1].strong_convexity == 0.1);
}

TEST_CASE("malformed instances are rejected") {
  CHECK_THROWS(InstanceFromJson("{"));
  CHECK_THROWS(InstanceFromJson(R"({"n": 2, "kappa": 1, "objectives": [{"kind": "cubic"}]})"));
  CHECK_THROWS(InstanceFromJson(
      R"({"n": 2, "N": 2, "kappa": 1, "objectives": [{"kind": "quadratic", "Q": [[1,0],[0,1]], "q": [0,0], "d": 0}]})"));
  CHECK_THROWS(InstanceFromJson(
      R"({"n": 2, "kappa": 1, "objectives": [{"kind": "quadratic", "Q": [[1,0]], "q": [0,0], "d": 0}]})"));
}

TEST_CASE("config overrides and validation") {
  const DipoaConfig cfg = ConfigFromJson(
      R"({"use_sfp": false, "eps_gap": 0.5, "max_iter": 7, "schedule": "threaded", "admm": {"rho0": 3.0}})");
  CHECK_FALSE(cfg.use_sfp);
  CHECK(cfg.eps_gap == 0.5);
  CHECK(cfg.max_iter == 7);
  CHECK(cfg.schedule == Schedule::kThreaded);
  CHECK(cfg.admm.rho0 == 3.0);
  CHECK(cfg.et_tol == 0.1);
  CHECK_THROWS(ConfigFromJson(R"({"eps_gap": -1})"));
  CHECK_THROWS(ConfigFromJson(R"({"admm": {"relax_alpha": 5}})"));
}

TEST_CASE("text files") {
  const std::string path = "dipoa_io_test.txt";
  WriteTextFile(path, "hello\n");
  CHECK(ReadTextFile(path) == "hello\n");
  std::remove(path.c_str());
  CHECK_THROWS(ReadTextFile("definitely/not/here.json"));
}

TEST_CASE("missing keys and wrong types are reported as invalid arguments") {
  CHECK_THROWS_AS(InstanceFromJson(R"({"n": 2})"), std::invalid_argument);
  CHECK_THROWS_AS(InstanceFromJson("not json"), std::invalid_argument);
  CHECK_THROWS_AS(ConfigFromJson(R"({"eps_gap": "small"})"), std::invalid_argument);
  CHECK_THROWS_AS(TopologyFromJson(R"({"N": 3})"), std::invalid_argument);
}
