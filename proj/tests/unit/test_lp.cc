#include <cmath>

#include "doctest.h"
#include "dipoa/lp.hpp"

using namespace dipoa;

namespace {

// Two-column LP optimum by enumerating every pair of tight constraints
// (rows and bounds); returns +inf when nothing is feasible.
double VertexOracle(const Matrix& rows, const Vector& rhs, const Vector& cost, const Vector& lo,
                    const Vector& hi) {
  std::vector<Eigen::RowVector2d> a;
  std::vector<double> b;
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    a.push_back(rows.row(r));
    b.push_back(rhs[r]);
  }
  for (int c = 0; c < 2; ++c) {
    Eigen::RowVector2d e = Eigen::RowVector2d::Zero();
    e[c] = 1;
    a.push_back(e);
    b.push_back(hi[c]);
    a.push_back(-e);
    b.push_back(-lo[c]);
  }
  double best = kInf;
  for (size_t p = 0; p < a.size(); ++p) {
    for (size_t q = p + 1; q < a.size(); ++q) {
      Eigen::Matrix2d m;
      m << a[p], a[q];
      if (std::abs(m.determinant()) < 1e-12) continue;
      const Eigen::Vector2d v = m.inverse() * Eigen::Vector2d(b[p], b[q]);
      bool ok = true;
      for (size_t r = 0; r < a.size() && ok; ++r) ok = a[r].dot(v) <= b[r] + 1e-9;
      if (ok) best = std::min(best, cost.dot(Vector(v)));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("small LP with a known optimum") {
  // min -x - y  s.t. x + 2y <= 4, 3x + y <= 6, 0 <= x, y <= 10  ->  (1.6, 1.2)
  LinearProgram lp(2);
  lp.objective() << -1, -1;
  lp.lower().setZero();
  lp.upper().setConstant(10);
  Vector r1(2), r2(2);
  r1 << 1, 2;
  r2 << 3, 1;
  lp.AddRow(r1, RowSense::kLessEqual, 4);
  lp.AddRow(r2, RowSense::kLessEqual, 6);
  const LpResult res = SolveLp(lp);
  REQUIRE(res.status == LpStatus::kOptimal);
  CHECK(res.x[0] == doctest::Approx(1.6));
  CHECK(res.x[1] == doctest::Approx(1.2));
  CHECK(res.objective == doctest::Approx(-2.8));
}

TEST_CASE("equality rows and greater-equal rows") {
  LinearProgram lp(2);
  lp.objective() << 1, 2;
  lp.lower().setConstant(-5);
  lp.upper().setConstant(5);
  Vector sum(2), first(2);
  sum << 1, 1;
  first << 1, 0;
  lp.AddRow(sum, RowSense::kEqual, 1);
  lp.AddGreaterEqual(first, -2);
  const LpResult res = SolveLp(lp);
  REQUIRE(res.status == LpStatus::kOptimal);
  CHECK(res.x[0] == doctest::Approx(5));
  CHECK(res.x[1] == doctest::Approx(-4));
}

TEST_CASE("infeasible and unbounded LPs are classified") {
  LinearProgram infeasible(1);
  infeasible.objective() << 1;
  infeasible.lower() << 0;
  infeasible.upper() << 1;
  Vector one = Vector::Ones(1);
  infeasible.AddGreaterEqual(one, 2);
  CHECK(SolveLp(infeasible).status == LpStatus::kInfeasible);

  LinearProgram unbounded(1);
  unbounded.objective() << -1;
  unbounded.lower() << 0;
  unbounded.upper() << kInf;
  CHECK(SolveLp(unbounded).status == LpStatus::kUnbounded);
}

TEST_CASE("random two-column LPs agree with vertex enumeration") {
  Rng rng(21);
  for (int t = 0; t < 200; ++t) {
    const int m = 1 + rng.Index(6);
    Matrix rows(m, 2);
    Vector rhs(m);
    for (int r = 0; r < m; ++r) {
      rows(r, 0) = rng.Normal();
      rows(r, 1) = rng.Normal();
      rhs[r] = rng.Uniform(-1, 3);
    }
    Vector cost = rng.NormalVector(2);
    Vector lo = Vector::Constant(2, -4), hi = Vector::Constant(2, 4);
    LinearProgram lp(2);
    lp.objective() = cost;
    lp.lower() = lo;
    lp.upper() = hi;
    for (int r = 0; r < m; ++r) lp.AddRow(rows.row(r).transpose(), RowSense::kLessEqual, rhs[r]);
    const double expected = VertexOracle(rows, rhs, cost, lo, hi);
    const LpResult res = SolveLp(lp);
    if (std::isinf(expected)) {
      CHECK(res.status == LpStatus::kInfeasible);
    } else {
      REQUIRE(res.status == LpStatus::kOptimal);
      CHECK(res.objective == doctest::Approx(expected).epsilon(1e-8));
    }
  }
}

TEST_CASE("warm start after adding a row gives the cold-start optimum") {
  Rng rng(4);
  LinearProgram lp(3);
  lp.objective() = rng.NormalVector(3);
  lp.lower().setConstant(-2);
  lp.upper().setConstant(2);
  for (int r = 0; r < 4; ++r) lp.AddRow(rng.NormalVector(3), RowSense::kLessEqual, 1.0);
  const LpResult first = SolveLp(lp);
  REQUIRE(first.status == LpStatus::kOptimal);
  lp.AddRow(rng.NormalVector(3), RowSense::kLessEqual, 0.1);
  const LpResult warm = SolveLp(lp, &first.basis);
  const LpResult cold = SolveLp(lp);
  REQUIRE(cold.status == warm.status);
  if (cold.status == LpStatus::kOptimal) CHECK(warm.objective == doctest::Approx(cold.objective));
}
