#include <cmath>
#include <memory>

#include "doctest.h"
#include "dipoa/problem.hpp"

using namespace dipoa;

namespace {

ScpInstance QuadraticInstance(int n, int kappa) {
  ScpInstance inst;
  inst.n = n;
  inst.kappa = kappa;
  Matrix Q = 2.0 * Matrix::Identity(n, n);
  inst.objectives.push_back({std::make_shared<QuadraticFunction>(Q, Vector::Ones(n), 0.0), 2.0});
  inst.polytope = Polytope::Box(Vector::Constant(n, -1.0), Vector::Constant(n, 1.0));
  return inst;
}

// Central differences computed here, independent of the library helper.
Vector CentralDifference(const SmoothFunction& f, const Vector& x) {
  const double h = 1e-6;
  Vector g(x.size());
  for (Eigen::Index c = 0; c < x.size(); ++c) {
    Vector a = x, b = x;
    a[c] += h;
    b[c] -= h;
    g[c] = (f.Value(a) - f.Value(b)) / (2 * h);
  }
  return g;
}

}  // namespace

TEST_CASE("well-formed quadratic instance has no findings") {
  const ValidationReport report = ValidateInstance(QuadraticInstance(3, 1));
  CHECK(report.ok());
}

TEST_CASE("kappa equal to n is reported as not strict") {
  const ValidationReport report = ValidateInstance(QuadraticInstance(3, 3));
  CHECK(report.Has("cardinality_not_strict"));
}

TEST_CASE("gradient off by a factor of two is caught") {
  ScpInstance inst = QuadraticInstance(2, 1);
  auto value = [](const Vector& x) { return x.squaredNorm(); };
  auto wrong_gradient = [](const Vector& x) -> Vector { return 4.0 * x; };
  inst.objectives.push_back({std::make_shared<CallableFunction>(2, value, wrong_gradient), 0.0});
  CHECK(ValidateInstance(inst, 3).Has("gradient"));
}

TEST_CASE("big-M of a one-dimensional box") {
  const Polytope box = Polytope::Box(Vector::Constant(1, -2.0), Vector::Constant(1, 3.0));
  const Vector m = ComputeBigM(box);
  REQUIRE(m.size() == 1);
  CHECK(m[0] == doctest::Approx(3.0 + 1e-6).epsilon(1e-12));
}

TEST_CASE("big-M of the unit simplex") {
  Polytope simplex;
  simplex.D.resize(3, 2);
  simplex.D << 1, 1, -1, 0, 0, -1;
  simplex.d = Vector(3);
  simplex.d << 1, 0, 0;
  simplex.A.resize(0, 2);
  simplex.b.resize(0);
  const Vector m = ComputeBigM(simplex);
  CHECK(m[0] == doctest::Approx(1.0 + 1e-6).epsilon(1e-12));
  CHECK(m[1] == doctest::Approx(1.0 + 1e-6).epsilon(1e-12));
}

TEST_CASE("big-M of an unbounded region throws") {
  Polytope orthant;
  orthant.D = -Matrix::Identity(2, 2);
  orthant.d = Vector::Zero(2);
  orthant.A.resize(0, 2);
  orthant.b.resize(0);
  CHECK_THROWS_AS(ComputeBigM(orthant), UnboundedPolytope);
}

TEST_CASE("big-M of an empty region throws") {
  Polytope empty;
  empty.D.resize(2, 1);
  empty.D << 1, -1;
  empty.d = Vector(2);
  empty.d << -1, -1;  // x <= -1 and x >= 1
  empty.A.resize(0, 1);
  empty.b.resize(0);
  CHECK_THROWS_AS(ComputeBigM(empty), EmptyPolytope);
}

TEST_CASE("big-M covers every vertex of a random box") {
  Rng rng(11);
  Vector lo(4), hi(4);
  for (int c = 0; c < 4; ++c) {
    lo[c] = rng.Uniform(-5, 0);
    hi[c] = rng.Uniform(0, 5);
  }
  const Vector m = ComputeBigM(Polytope::Box(lo, hi));
  for (int mask = 0; mask < 16; ++mask) {
    for (int c = 0; c < 4; ++c) {
      const double v = (mask >> c & 1) ? hi[c] : lo[c];
      CHECK(std::abs(v) <= m[c]);
    }
  }
}

TEST_CASE("logistic gradient matches central differences") {
  Rng rng(5);
  Matrix X(30, 4);
  for (int r = 0; r < 30; ++r)
    for (int c = 0; c < 4; ++c) X(r, c) = rng.Normal();
  Vector labels(30);
  for (int r = 0; r < 30; ++r) labels[r] = rng.Uniform() < 0.5 ? -1.0 : 1.0;
  const LogisticFunction f(X, labels, 0.1);
  for (int t = 0; t < 10; ++t) {
    const Vector x = rng.NormalVector(4);
    const Vector g = f.Gradient(x);
    const Vector fd = CentralDifference(f, x);
    CHECK((g - fd).norm() <= 1e-4 * std::max(1.0, g.norm()));
  }
}

TEST_CASE("strong convexity inequality holds for logistic and quadratic oracles") {
  Rng rng(8);
  Matrix X(20, 3);
  for (int r = 0; r < 20; ++r)
    for (int c = 0; c < 3; ++c) X(r, c) = rng.Normal();
  Vector labels = Vector::Ones(20);
  const LogisticFunction logistic(X, labels, 0.5);
  Matrix L = Matrix::Random(3, 3);
  const QuadraticFunction quad(L * L.transpose() + 0.3 * Matrix::Identity(3, 3), Vector::Ones(3), 1.0);
  const double quad_m = quad.MinEigenvalue();
  CHECK(quad_m >= 0.3 - 1e-12);
  for (int t = 0; t < 100; ++t) {
    const Vector x = 3 * rng.NormalVector(3), xb = 3 * rng.NormalVector(3);
    const double lhs1 = logistic.Value(x);
    const double rhs1 = logistic.Value(xb) + logistic.Gradient(xb).dot(x - xb) +
                        0.25 * (x - xb).squaredNorm();
    CHECK(lhs1 >= rhs1 - 1e-9);
    const double lhs2 = quad.Value(x);
    const double rhs2 =
        quad.Value(xb) + quad.Gradient(xb).dot(x - xb) + 0.5 * quad_m * (x - xb).squaredNorm();
    CHECK(lhs2 >= rhs2 - 1e-9);
  }
}

TEST_CASE("polytope membership") {
  const Polytope box = Polytope::Box(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0));
  CHECK(box.Contains(Vector::Zero(2)));
  CHECK_FALSE(box.Contains(Vector::Constant(2, 1.5)));
  CHECK(Polytope::Free(2).empty());
}
