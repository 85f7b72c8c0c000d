#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "dipoa/rhadmm.hpp"
#include "../support/builders.hpp"

using namespace dipoa;
using builders::Vec;

namespace {

// l1-ball projection by bisection on the soft-threshold level.
Vector BisectionL1Projection(const Vector& v, double radius) {
  if (v.lpNorm<1>() <= radius) return v;
  double lo = 0.0, hi = v.cwiseAbs().maxCoeff();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double mass = (v.cwiseAbs().array() - mid).max(0.0).sum();
    (mass > radius ? lo : hi) = mid;
  }
  const double t = 0.5 * (lo + hi);
  return v.array().sign() * (v.cwiseAbs().array() - t).max(0.0);
}

AdmmConfig TightConfig() {
  AdmmConfig cfg;
  cfg.eps_primal = 1e-8;
  cfg.eps_dual = 1e-8;
  cfg.max_iter = 20000;
  return cfg;
}

}  // namespace

TEST_CASE("penalty adaptation balances residuals") {
  AdmmConfig cfg;
  cfg.mu = 10;
  cfg.tau = 2;
  CHECK(AdaptPenalty(10, 0.1, 1, cfg) == 2.0);
  CHECK(AdaptPenalty(0.1, 10, 1, cfg) == 0.5);
  CHECK(AdaptPenalty(1, 1, 1, cfg) == 1.0);
}

TEST_CASE("config validation rejects out-of-range fields") {
  AdmmConfig cfg;
  CHECK_NOTHROW(ValidateAdmmConfig(cfg));
  cfg.relax_alpha = 2.0;
  CHECK_THROWS(ValidateAdmmConfig(cfg));
  cfg = AdmmConfig{};
  cfg.rho0 = 0;
  CHECK_THROWS(ValidateAdmmConfig(cfg));
}

TEST_CASE("LFC update clips to the big-M box") {
  const std::vector<Vector> contributions{Vec({1, -4}), Vec({3, -6})};
  const Vector m = Vec({3, 3});
  const Vector full = LfcYUpdate(contributions, BoxSet(m, {1, 1}));
  CHECK(full[0] == doctest::Approx(2));
  CHECK(full[1] == doctest::Approx(-3));
  const Vector half = LfcYUpdate(contributions, BoxSet(m, {1, 0}));
  CHECK(half[0] == doctest::Approx(2));
  CHECK(half[1] == 0.0);
  const Vector ball = LfcYUpdate({Vec({2, 1})}, L1BallSet(1.0));
  CHECK(ball[0] == doctest::Approx(1));
  CHECK(ball[1] == doctest::Approx(0));
}

TEST_CASE("l1-ball projection agrees with the bisection oracle") {
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const Vector v = 3 * rng.NormalVector(6);
    const double radius = rng.Uniform(0.1, 6);
    const Vector p = ProjectL1Ball(v, radius);
    CHECK((p - BisectionL1Projection(v, radius)).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(p.lpNorm<1>() <= radius + 1e-9);
  }
}

TEST_CASE("box projection pins zero-width coordinates exactly") {
  const Vector p = ProjectBox(Vec({0.3, -7, 2}), Vec({0, 5, 5}));
  CHECK(p[0] == 0.0);
  CHECK(p[1] == -5.0);
  CHECK(p[2] == 2.0);
}

TEST_CASE("local x-update in closed form") {
  ScpInstance inst = builders::DistanceInstance({Vec({1})}, 1, 10);
  inst.polytope = Polytope::Free(1);
  const ConstrainedResult r =
      LocalXUpdate(inst, 0, LocalMode::kObjective, Vec({3}), 2.0, Vec({0}));
  CHECK(r.x[0] == doctest::Approx(2).epsilon(1e-8));
}

TEST_CASE("local x-update of a zero objective projects onto the polytope") {
  ScpInstance inst;
  inst.n = 2;
  inst.kappa = 1;
  auto zero = std::make_shared<CallableFunction>(
      2, [](const Vector&) { return 0.0; }, [](const Vector&) -> Vector { return Vector::Zero(2); });
  inst.objectives.push_back({zero, 0.0});
  inst.polytope = Polytope::Box(Vec({-1, -1}), Vec({1, 1}));
  const ConstrainedResult r =
      LocalXUpdate(inst, 0, LocalMode::kObjective, Vec({3, -0.5}), 1.0, Vec({0, 0}));
  CHECK(r.x[0] == doctest::Approx(1).epsilon(1e-6));
  CHECK(r.x[1] == doctest::Approx(-0.5).epsilon(1e-6));
}

TEST_CASE("local x-update on a logistic node is stationary") {
  Rng rng(2);
  Matrix X(25, 3);
  for (int r = 0; r < 25; ++r)
    for (int c = 0; c < 3; ++c) X(r, c) = rng.Normal();
  Vector labels(25);
  for (int r = 0; r < 25; ++r) labels[r] = rng.Uniform() < 0.5 ? -1.0 : 1.0;
  ScpInstance inst;
  inst.n = 3;
  inst.kappa = 1;
  auto f = std::make_shared<LogisticFunction>(X, labels, 0.3);
  inst.objectives.push_back({f, 0.3});
  inst.polytope = Polytope::Free(3);
  const Vector center = rng.NormalVector(3);
  const ConstrainedResult r = LocalXUpdate(inst, 0, LocalMode::kObjective, center, 1.5, Vector::Zero(3));
  const Vector grad = f->Gradient(r.x) + 1.5 * (r.x - center);
  CHECK(grad.norm() <= 1e-8);
}

TEST_CASE("two quadratics meet at their average") {
  ScpInstance inst = builders::DistanceInstance({Vec({1}), Vec({3})}, 1, 10);
  inst.big_m = Vec({10});
  Communicator comm(Hypergraph::Blocks(2, 1));
  AdmmEngine engine(inst, comm, TightConfig());
  const PrimalSolution on = engine.SolvePrimal({{1}});
  REQUIRE(on.converged());
  CHECK(on.x[0][0] == doctest::Approx(2).epsilon(1e-6));
  CHECK(on.x[1][0] == doctest::Approx(2).epsilon(1e-6));
  CHECK(on.y[0][0] == doctest::Approx(2).epsilon(1e-6));
  CHECK(on.objective == doctest::Approx(2).epsilon(1e-6));

  const PrimalSolution off = engine.SolvePrimal({{0}});
  REQUIRE(off.converged());
  CHECK(off.y[0][0] == 0.0);
  CHECK(std::abs(off.x[0][0]) <= 1e-6);
  CHECK(off.objective == doctest::Approx(10).epsilon(1e-6));
}

TEST_CASE("random quadratics match the normal-equation solution") {
  const ScpInstance inst = builders::RandomQuadratics(3, 4, 4, 17, 100.0);
  Matrix Q = Matrix::Zero(4, 4);
  Vector q = Vector::Zero(4);
  for (const auto& o : inst.objectives) {
    const auto& f = static_cast<const QuadraticFunction&>(*o.function);
    Q += f.Q();
    q += f.q();
  }
  const Vector expected = Q.ldlt().solve(-q);
  REQUIRE(expected.cwiseAbs().maxCoeff() < 100.0);
  Communicator comm(Hypergraph::Blocks(3, 2));
  AdmmEngine engine(inst, comm, TightConfig());
  const PrimalSolution sol = engine.SolvePrimal({BinaryVector(4, 1), BinaryVector(4, 1)});
  REQUIRE(sol.converged());
  for (const auto& y : sol.y) CHECK((y - expected).cwiseAbs().maxCoeff() <= 1e-5);
  // Consensus and support compliance.
  for (int j = 0; j < 2; ++j)
    for (int i : comm.graph().edges[j]) CHECK((sol.x[i] - sol.y[j]).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("zeroed coordinates stay exactly zero") {
  const ScpInstance inst = builders::RandomQuadratics(2, 3, 2, 9);
  Communicator comm(Hypergraph::Blocks(2, 1));
  AdmmEngine engine(inst, comm, AdmmConfig{});
  const PrimalSolution sol = engine.SolvePrimal({{1, 0, 1}});
  CHECK(sol.y[0][1] == 0.0);
  CHECK(sol.Consensus()[1] == 0.0);
}

TEST_CASE("l1 relaxation") {
  SUBCASE("inactive ball returns the unconstrained minimizer") {
    ScpInstance inst = builders::DistanceInstance({Vec({0.5})}, 1, 10);
    Communicator comm(Hypergraph::Blocks(1, 1));
    AdmmEngine engine(inst, comm, TightConfig());
    const PrimalSolution sol = engine.SolveRelaxedL1(10.0);
    CHECK(sol.y[0][0] == doctest::Approx(0.5).epsilon(1e-6));
  }
  SUBCASE("active ball stops at the boundary") {
    ScpInstance inst = builders::DistanceInstance({Vec({5})}, 1, 10);
    Communicator comm(Hypergraph::Blocks(1, 1));
    AdmmEngine engine(inst, comm, TightConfig());
    const PrimalSolution sol = engine.SolveRelaxedL1(1.0);
    CHECK(sol.y[0][0] == doctest::Approx(1).epsilon(1e-6));
  }
  SUBCASE("three-dimensional quadratic matches projected gradient") {
    const ScpInstance inst = builders::RandomQuadratics(1, 3, 1, 31);
    const auto& f = static_cast<const QuadraticFunction&>(*inst.objectives[0].function);
    Vector x = Vector::Zero(3);
    const double step = 1.0 / f.Q().eigenvalues().real().maxCoeff();
    for (int it = 0; it < 100000; ++it) x = BisectionL1Projection(x - step * f.Gradient(x), 1.0);
    Communicator comm(Hypergraph::Blocks(1, 1));
    AdmmEngine engine(inst, comm, TightConfig());
    const PrimalSolution sol = engine.SolveRelaxedL1(1.0);
    REQUIRE(sol.converged());
    CHECK((sol.y[0] - x).cwiseAbs().maxCoeff() <= 1e-5);
  }
}

TEST_CASE("relaxation never exceeds a restricted solve") {
  const ScpInstance inst = builders::RandomQuadratics(2, 4, 2, 41);
  Communicator comm(Hypergraph::Blocks(2, 1));
  AdmmEngine engine(inst, comm, AdmmConfig{});
  const double radius = inst.kappa * engine.big_m().maxCoeff();
  const PrimalSolution relaxed = engine.SolveRelaxedL1(radius);
  for (const BinaryVector& z : {BinaryVector{1, 1, 0, 0}, BinaryVector{0, 1, 0, 1}}) {
    const PrimalSolution restricted = engine.SolvePrimal({z});
    CHECK(relaxed.objective <= restricted.objective + 1e-6);
  }
}

TEST_CASE("residual trace CSV header") {
  PrimalSolution sol;
  sol.trace.push_back({1, 0.5, 0.25, 1.0});
  const std::string csv = ResidualTraceCsv(sol);
  CHECK(csv.rfind("iter,primal_res,dual_res,rho\n", 0) == 0);
  CHECK(csv.find("1,0.5,0.25,1") != std::string::npos);
}
