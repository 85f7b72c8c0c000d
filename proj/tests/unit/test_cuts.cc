#include <cmath>

#include "doctest.h"
#include "dipoa/cuts.hpp"
#include "json.hpp"
#include "../support/builders.hpp"

using namespace dipoa;
using builders::Vec;

namespace {

ObjectiveOracle Square(double m) {
  return {std::make_shared<QuadraticFunction>(2.0 * Matrix::Identity(1, 1), Vector::Zero(1), 0.0), m};
}

}  // namespace

TEST_CASE("linear cut of x^2") {
  const Cut at2 = MakeLinearCut(0, Vec({2}), Square(2));
  CHECK(at2.fval == doctest::Approx(4));
  CHECK(at2.grad[0] == doctest::Approx(4));
  CHECK(at2.Evaluate(Vec({3})) == doctest::Approx(8));
  const Cut at0 = MakeLinearCut(0, Vec({0}), Square(2));
  CHECK(at0.Evaluate(Vec({5})) == doctest::Approx(0));
}

TEST_CASE("second-order cut of x^2") {
  const Cut exact = MakeSoCut(0, Vec({1}), Square(2));
  for (double x : {-3.0, 0.0, 1.0, 2.5}) CHECK(exact.Evaluate(Vec({x})) == doctest::Approx(x * x));
  const Cut loose = MakeSoCut(0, Vec({1}), Square(1));
  CHECK(loose.Evaluate(Vec({1})) == doctest::Approx(1));
  for (double x : {-3.0, 0.0, 2.5}) {
    CHECK(loose.Evaluate(Vec({x})) == doctest::Approx(1 + 2 * (x - 1) + 0.5 * (x - 1) * (x - 1)));
    CHECK(loose.Evaluate(Vec({x})) < x * x);
  }
  CHECK_THROWS_AS(MakeSoCut(0, Vec({1}), Square(0)), NotStronglyConvex);
}

TEST_CASE("cuts of a logistic loss underestimate it") {
  Rng rng(13);
  Matrix X(40, 3);
  for (int r = 0; r < 40; ++r)
    for (int c = 0; c < 3; ++c) X(r, c) = rng.Normal();
  Vector labels(40);
  for (int r = 0; r < 40; ++r) labels[r] = rng.Uniform() < 0.5 ? -1.0 : 1.0;
  const ObjectiveOracle oracle{std::make_shared<LogisticFunction>(X, labels, 0.1), 0.1};
  const Vector xbar = rng.NormalVector(3);
  const Cut linear = MakeLinearCut(0, xbar, oracle);
  const Cut second = MakeSoCut(0, xbar, oracle);
  for (int t = 0; t < 1000; ++t) {
    const Vector x = 5 * rng.NormalVector(3);
    const double f = oracle.function->Value(x);
    CHECK(linear.Evaluate(x) <= f + 1e-9);
    CHECK(second.Evaluate(x) <= f + 1e-9);
    CHECK(second.Evaluate(x) - linear.Evaluate(x) >= -1e-12);
  }
}

TEST_CASE("feasibility cuts of x^2 - 1") {
  const QuadraticFunction g(2.0 * Matrix::Identity(1, 1), Vector::Zero(1), -1.0);
  const Cut active = MakeFeasibilityCut(0, Vec({1}), g);
  CHECK(active.fval == 0.0);
  CHECK(active.Evaluate(Vec({3})) == doctest::Approx(4));
  const Cut violated = MakeFeasibilityCut(0, Vec({2}), g);
  CHECK(violated.fval == doctest::Approx(3));
  CHECK(violated.Evaluate(Vec({0})) == doctest::Approx(3 + 4 * (0 - 2)));
}

TEST_CASE("feasibility cut at a violated point keeps every feasible grid point") {
  Rng rng(6);
  for (int t = 0; t < 20; ++t) {
    Matrix B(2, 2);
    B << rng.Normal(), rng.Normal(), rng.Normal(), rng.Normal();
    const QuadraticFunction g(B * B.transpose() + 0.1 * Matrix::Identity(2, 2), rng.NormalVector(2),
                              -rng.Uniform(0.5, 2));
    Vector xbar = 3 * rng.NormalVector(2);
    if (g.Value(xbar) <= 0) continue;
    const Cut cut = MakeFeasibilityCut(0, xbar, g);
    CHECK(cut.Evaluate(xbar) > 0);
    for (int a = -40; a <= 40; ++a) {
      for (int b = -40; b <= 40; ++b) {
        const Vector x = Vec({a * 0.1, b * 0.1});
        if (g.Value(x) <= 0) CHECK(cut.Evaluate(x) <= 1e-9);
      }
    }
  }
}

TEST_CASE("aggregate feasibility cut") {
  std::vector<ConstraintOracle> cons;
  cons.push_back({std::make_shared<QuadraticFunction>(2.0 * Matrix::Identity(1, 1), Vector::Zero(1), -1.0)});
  cons.push_back({std::make_shared<QuadraticFunction>(Matrix::Zero(1, 1), Vec({1}), -0.5)});
  const Cut agg = MakeAggregateFeasibilityCut(cons, Vec({2}));
  CHECK(agg.constraint == -1);
  // Every point with both constraints satisfied, x in [-1, 0.5], passes.
  for (double x = -1.0; x <= 0.5; x += 0.01) CHECK(agg.Evaluate(Vec({x})) <= 1e-9);
  CHECK(agg.Evaluate(Vec({2})) > 0);
}

TEST_CASE("pool deduplicates and counts") {
  CutPool pool;
  CHECK(pool.Add(MakeLinearCut(0, Vec({1}), Square(2)), 1, CutSource::kPrimal));
  CHECK_FALSE(pool.Add(MakeLinearCut(0, Vec({1 + 1e-12}), Square(2)), 2, CutSource::kPrimal));
  CHECK(pool.Add(MakeLinearCut(1, Vec({1}), Square(2)), 2, CutSource::kPrimal));
  CHECK(pool.Add(MakeSoCut(0, Vec({1}), Square(2)), 3, CutSource::kPrimal));
  CHECK(pool.size() == 3);
  CHECK(pool.Count(CutKind::kLinear) == 2);
  CHECK(pool.Count(CutKind::kSecondOrder) == 1);
  const auto dump = nlohmann::json::parse(pool.ToJson());
  REQUIRE(dump.is_array());
  CHECK(dump.size() == 3);
  CHECK(dump[2]["kind"] == "second_order");
  CHECK(dump[0].contains("xbar"));
  CHECK(dump[0].contains("grad"));
}

TEST_CASE("relative gap") {
  CHECK(RelativeGap(2, 1) == 50.0);
  CHECK(RelativeGap(3.5, 3.5) == 0.0);
  CHECK(RelativeGap(0, -0.001) == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(std::isinf(RelativeGap(kInf, 1)));
}

TEST_CASE("event trigger") {
  CHECK(EventTriggered(10, 9, 0.2));
  CHECK_FALSE(EventTriggered(10, 5, 0.2));
  CHECK(EventTriggered(10, 10, 0.2));
  CHECK(EventTriggered(0, 0, 0.2));
  CHECK(EventRatio(10, 9) == doctest::Approx(0.1));
}
