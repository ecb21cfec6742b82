#include "doctest.h"

#include "degen/metric.hpp"

#include <cmath>

using namespace degen;

TEST_CASE("identity metric reduces to the Euclidean norm") {
  const MetricField m = identity_metric(2);
  Point x(2);
  x << 0.3, 0.7;
  GammaVector xi(2, 1);
  xi(0, 0) = 3.0;
  xi(0, 1) = 4.0;
  CHECK(gamma_norm(m, x, xi) == doctest::Approx(5.0));
}

TEST_CASE("diagonal metric weights each direction") {
  const MetricField m = diagonal_metric({4.0, 1.0});
  Point x(2);
  x << 0.5, 0.5;
  GammaVector xi(2, 1);
  xi(0, 0) = 1.0;
  CHECK(gamma_norm(m, x, xi) == doctest::Approx(2.0));
  CHECK(m.is_constant());
}

TEST_CASE("inner product sums over codomain components") {
  const SpatialMatrix g = diagonal_metric({2.0, 3.0}).eval(Point::Constant(2, 0.5));
  GammaVector a(2, 2), b(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 1.0;
  b(0, 0) = 5.0;
  b(1, 1) = 7.0;
  CHECK(gamma_inner(g, a, b) == doctest::Approx(2.0 * 5.0 + 3.0 * 7.0));
}

TEST_CASE("evaluation outside the unit cube is rejected") {
  const MetricField m = identity_metric(2);
  Point x(2);
  x << 1.5, 0.0;
  CHECK_THROWS_AS(m.eval(x), std::out_of_range);
}

TEST_CASE("library metrics pass their own validation") {
  const auto pts = sample_grid(2, 9);
  for (const MetricField& m :
       {identity_metric(2), diagonal_metric({0.5, 2.0}), rotation_metric(1.0, 3.0, 1.2),
        affine_diagonal_metric(2, 0.8)}) {
    const MetricValidation v = validate_metric(m, pts, 1e-5);
    CAPTURE(m.name());
    CHECK(v.ok());
    CHECK(v.c0_emp >= m.c0() - 1e-12);
    CHECK(v.c1_emp <= m.c1() + 1e-12);
  }
}

TEST_CASE("rotation metric keeps its eigenvalues everywhere") {
  const MetricField m = rotation_metric(1.0, 4.0, 2.0);
  for (const Point& x : sample_grid(2, 5)) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m.eval(x).topLeftCorner<2, 2>());
    CHECK(es.eigenvalues()[0] == doctest::Approx(1.0));
    CHECK(es.eigenvalues()[1] == doctest::Approx(4.0));
  }
}

TEST_CASE("validation flags a metric whose declared bounds are too tight") {
  const MetricField loose = affine_diagonal_metric(2, 1.0);
  const MetricField bad("bad", 2, [&](const Point& x) { return loose.eval(x); }, 1.0, 1.5, 0.1);
  const MetricValidation v = validate_metric(bad, sample_grid(2, 5), 1e-5);
  CHECK_FALSE(v.c1_ok);
  CHECK_FALSE(v.c2_ok);
}

TEST_CASE("make_metric checks names and parameter counts") {
  CHECK(make_metric("identity", 1, {}).dim() == 1);
  CHECK_THROWS_AS(make_metric("diagonal", 2, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_metric("rotation", 1, {1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(make_metric("nope", 2, {}), std::invalid_argument);
}
