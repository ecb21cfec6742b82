#include "doctest.h"

#include "degen/kernel.hpp"
#include "degen/lemma_oracle.hpp"

#include <cmath>
#include <stdexcept>

using namespace degen;

namespace {

Point pt(double a, double b) {
  Point x(2);
  x << a, b;
  return x;
}

/// Scalar field on the plane with constant Hessian.
SmoothField quadratic(double a11, double a22, double b1, double b2) {
  return [=](const Point& x) {
    FieldJet j;
    j.dv = GammaVector(2, 1);
    j.dv(0, 0) = 2 * a11 * x[0] + b1;
    j.dv(0, 1) = 2 * a22 * x[1] + b2;
    j.hess[0] = SpatialMatrix::Zero(2, 2);
    j.hess[0](0, 0) = 2 * a11;
    j.hess[0](1, 1) = 2 * a22;
    return j;
  };
}

std::vector<Point> patch(double lo, double hi, int k) {
  std::vector<Point> pts;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      pts.push_back(pt(lo + (hi - lo) * i / (k - 1), lo + (hi - lo) * j / (k - 1)));
  return pts;
}

}  // namespace

TEST_CASE("lemma names round-trip") {
  CHECK(all_lemmas().size() == 17);
  for (LemmaId id : all_lemmas()) CHECK(parse_lemma(lemma_name(id)) == id);
  CHECK_THROWS_AS(parse_lemma("L2_99"), std::invalid_argument);
  CHECK(lemma_mode(LemmaId::L2_5a) == LemmaMode::exact);
  CHECK(lemma_mode(LemmaId::L2_8_2) == LemmaMode::exact);
  CHECK(lemma_mode(LemmaId::L2_10) == LemmaMode::ratio);
  CHECK(std::string(mode_name(LemmaMode::ratio)) == "ratio");
}

TEST_CASE("single evaluations") {
  // g(2)^2 <= h(2) (2 - 1)^2 at p = 2
  const double g = kernel_g(2.0, 2.0);
  CHECK(g * g == doctest::Approx(0.25));
  CHECK(g * g <= kernel_h(2.0, 2.0) * 1.0);

  const SpatialMatrix id = SpatialMatrix::Identity(2, 2);
  GammaVector xi(2, 1), eta(2, 1);
  xi(0, 0) = 2.0;
  eta(0, 0) = 3.0;
  const double lhs = (truncated_gradient(id, xi, 0.0) - truncated_gradient(id, eta, 0.0)).euclidean_norm();
  CHECK(lhs / (eta - xi).euclidean_norm() == doctest::Approx(1.0));
}

TEST_CASE("exact-mode lemmas hold on every sample") {
  for (LemmaId id : {LemmaId::L2_5a, LemmaId::L2_6a, LemmaId::L2_6b, LemmaId::L2_7, LemmaId::L2_8_2}) {
    const LemmaReport r = run_lemma(LemmaCase{id}, 2000, 3);
    INFO(r.id << " " << r.worst_case);
    CHECK(r.samples == 2000);
    CHECK(r.violations == 0);
    CHECK(r.passed());
  }
}

TEST_CASE("monotone decomposition holds at scale") {
  const LemmaReport r = run_lemma(LemmaCase{LemmaId::L2_8_2}, 100000, 11);
  CHECK(r.violations == 0);
}

TEST_CASE("normalisation constant under the identity metric") {
  LemmaCase c{LemmaId::L2_1};
  c.identity_metric = true;
  const auto curve = estimate_constant(c, {1000, 2000, 4000}, 5);
  REQUIRE(curve.size() == 3);
  CHECK(curve[0] <= curve[1]);
  CHECK(curve[1] <= curve[2]);
  CHECK(curve[2] <= 2.0 + 1e-12);
  CHECK(curve[2] > 1.5);
}

TEST_CASE("truncation inverse estimate at fixed delta") {
  LemmaCase c{LemmaId::L2_3b};
  c.delta = 0.5;
  const LemmaReport r = run_lemma(c, 1000, 2);
  CHECK(std::isfinite(r.c_emp));
  CHECK(r.stable);
  CHECK(r.c_emp >= 1.0);
}

TEST_CASE("ratio reports are reproducible and stable") {
  for (LemmaId id : {LemmaId::L2_2, LemmaId::L2_4, LemmaId::L2_10}) {
    const LemmaReport a = run_lemma(LemmaCase{id}, 1000, 7);
    const LemmaReport b = run_lemma(LemmaCase{id}, 1000, 7);
    INFO(a.id << " " << a.worst_case);
    CHECK(a.c_emp == b.c_emp);
    CHECK(a.worst_case == b.worst_case);
    CHECK(a.c_emp >= a.c_emp_half);
    CHECK(a.passed());
  }
}

TEST_CASE("argument errors") {
  CHECK_THROWS_AS(run_lemma(LemmaCase{LemmaId::L2_1}, 999, 0), std::invalid_argument);
  CHECK_THROWS_AS(estimate_constant(LemmaCase{LemmaId::L2_7}, {1000}, 0), std::invalid_argument);
  CHECK_THROWS_AS(estimate_constant(LemmaCase{LemmaId::L2_1}, {2000, 1000}, 0), std::invalid_argument);
  LemmaCase bad{LemmaId::L2_4};
  bad.p_values = {1.0};
  CHECK_THROWS_WITH_AS(run_lemma(bad, 1000, 0), "p must exceed 1", std::invalid_argument);
  LemmaCase zero{LemmaId::L2_3b};
  zero.delta = 0.0;
  CHECK_THROWS_AS(run_lemma(zero, 1000, 0), std::invalid_argument);
}

TEST_CASE("second-order estimate on synthetic fields") {
  const MetricField id = identity_metric(2);
  L211Params prm;
  prm.p = 2.0;

  SUBCASE("affine field has zero left side") {
    const auto pts = patch(0.2, 0.8, 5);
    const LemmaReport r = check_l2_11(quadratic(0, 0, 2, 0), id, pts, prm);
    CHECK(r.samples == 25);
    CHECK(r.c_emp == 0.0);
    CHECK(r.stable);
  }
  SUBCASE("curved field away from the threshold") {
    // |Dv| = |(2 x1, 1)| >= 1.28 on the patch
    const auto pts = patch(0.4, 0.9, 6);
    for (double p : {1.5, 2.0, 3.0}) {
      prm.p = p;
      const LemmaReport r = check_l2_11(quadratic(1, 0, 0, 1), id, pts, prm);
      CHECK(std::isfinite(r.c_emp));
      CHECK(r.c_emp > 0.0);
      CHECK(r.stable);
    }
  }
  SUBCASE("gradient inside the unit ball contributes nothing") {
    const auto pts = patch(0.2, 0.8, 4);
    const LemmaReport r = check_l2_11(quadratic(0.1, 0.1, 0.3, 0), id, pts, prm);
    CHECK(r.c_emp == 0.0);
  }
  SUBCASE("gradient on the unit sphere is rejected") {
    const auto pts = patch(0.3, 0.7, 3);
    CHECK_THROWS_AS(check_l2_11(quadratic(0, 0, 1, 0), id, pts, prm), std::invalid_argument);
  }
}
