#include "doctest.h"

#include "degen/forms.hpp"
#include "degen/random.hpp"

#include <cmath>

using namespace degen;

namespace {

GammaVector row(double a, double b) {
  GammaVector xi(2, 1);
  xi(0, 0) = a;
  xi(0, 1) = b;
  return xi;
}

FormOperand random_operand(FormSpace space, int n, int big_n, SampleRng& rng) {
  FormOperand op(space, n, big_n);
  for (int k = 0; k < op.size(); ++k) op[k] = rng.normal();
  return op;
}

const SpatialMatrix kId = SpatialMatrix::Identity(2, 2);

}  // namespace

TEST_CASE("form_b parallel and orthogonal values") {
  const KernelParams kp{2.0, 0.0, 0.0};
  const GammaVector xi = row(2, 0);
  const FormOperand par = FormOperand::from_gradient(row(1, 0));
  const FormOperand orth = FormOperand::from_gradient(row(0, 1));
  CHECK(form_b(kId, xi, kp, par, par) == doctest::Approx(1.0));
  CHECK(form_b(kId, xi, kp, orth, orth) == doctest::Approx(0.5));
  CHECK(form_b(kId, xi, kp, FormOperand(FormSpace::gradient, 2, 1), par) == 0.0);
}

TEST_CASE("form_c values") {
  const KernelParams kp{2.0, 0.1, 0.0};
  FormOperand e1(FormSpace::spatial, 2, 1), e2(FormSpace::spatial, 2, 1);
  e1[0] = 1;
  e2[1] = 1;
  CHECK(form_c(kId, row(2, 0), kp, e1, e1) == doctest::Approx(1.1));
  CHECK(form_c(kId, row(2, 0), kp, e2, e2) == doctest::Approx(0.6));
  CHECK(form_c(kId, row(0.5, 0), KernelParams{2.0, 0.0, 0.0}, e1, e1) == 0.0);
}

TEST_CASE("form_a extremes and degenerate set") {
  const KernelParams kp{2.0, 0.0, 0.0};
  FormOperand aligned(FormSpace::second_gradient, 2, 1), orth(FormSpace::second_gradient, 2, 1);
  aligned.at(0, 0, 0) = 1.0;
  orth.at(0, 1, 1) = 1.0;
  CHECK(form_a(kId, row(2, 0), kp, aligned, aligned) == doctest::Approx(1.0));
  CHECK(form_a(kId, row(2, 0), kp, orth, orth) == doctest::Approx(0.5));
  SampleRng rng(3, 0);
  const FormOperand eta = random_operand(FormSpace::second_gradient, 2, 1, rng);
  const FormOperand zeta = random_operand(FormSpace::second_gradient, 2, 1, rng);
  double inner = 0.0;
  for (int k = 0; k < eta.size(); ++k) inner += eta[k] * zeta[k];
  CHECK(form_a(kId, row(0.5, 0), KernelParams{2.0, 0.3, 0.0}, eta, zeta) ==
        doctest::Approx(0.3 * inner));
}

TEST_CASE("forms reject xi = 0 and the threshold for p < 2") {
  const FormOperand e = FormOperand::from_gradient(row(1, 0));
  CHECK_THROWS_AS(form_b(kId, row(0, 0), KernelParams{2.0, 0.1, 0.0}, e, e), std::domain_error);
  CHECK_THROWS_AS(form_b(kId, row(1, 0), KernelParams{1.5, 0.1, 0.0}, e, e), std::domain_error);
  CHECK_NOTHROW(form_b(kId, row(1, 0), KernelParams{2.0, 0.1, 0.0}, e, e));
  CHECK_THROWS_AS(form_c(kId, row(2, 0), KernelParams{2.0, 0.1, 0.0}, e, e),
                  std::invalid_argument);
}

TEST_CASE("symmetry and bilinearity of all forms") {
  const MetricField m = rotation_metric(0.7, 2.5, 1.3);
  const FormSpace spaces[] = {FormSpace::second_gradient, FormSpace::gradient,
                              FormSpace::spatial};
  for (std::uint64_t k = 0; k < 300; ++k) {
    SampleRng rng(21, k);
    Point x(2);
    x << rng.uniform(), rng.uniform();
    const int big_n = 1 + rng.index(2);
    GammaVector xi(2, big_n);
    for (int j = 0; j < xi.size(); ++j) xi[j] = rng.uniform(-3, 3);
    const KernelParams kp{rng.uniform(1.3, 4.0), rng.uniform(0, 1), 0.0};
    for (FormSpace sp : spaces) {
      const FormOperand a = random_operand(sp, 2, big_n, rng);
      const FormOperand b = random_operand(sp, 2, big_n, rng);
      const FormOperand c = random_operand(sp, 2, big_n, rng);
      const double s = rng.uniform(-2, 2);
      FormOperand comb = a;
      comb.values() = a.values() + s * c.values();
      auto form = [&](const FormOperand& u, const FormOperand& v) {
        if (sp == FormSpace::second_gradient) return form_a(m, x, xi, kp, u, v);
        if (sp == FormSpace::gradient) return form_b(m, x, xi, kp, u, v);
        return form_c(m, x, xi, kp, u, v);
      };
      const double ab = form(a, b), ba = form(b, a);
      CHECK(std::abs(ab - ba) <= 1e-12 * (1 + std::abs(ab)));
      const double lin = form(a, b) + s * form(c, b);
      CHECK(std::abs(form(comb, b) - lin) <= 1e-12 * (1 + std::abs(form(a, b)) +
                                                       std::abs(s * form(c, b))));
    }
  }
}

TEST_CASE("form_b_matrix matches form_b") {
  const MetricField m = affine_diagonal_metric(2, 0.5);
  Point x(2);
  x << 0.4, 0.6;
  const SpatialMatrix g = m.eval(x);
  GammaVector xi(2, 2);
  xi(0, 0) = 1.5;
  xi(1, 1) = -0.7;
  const KernelParams kp{3.0, 0.05, 0.0};
  const Eigen::MatrixXd mat = form_b_matrix(g, xi, kp);
  SampleRng rng(5, 1);
  const FormOperand a = random_operand(FormSpace::gradient, 2, 2, rng);
  const FormOperand b = random_operand(FormSpace::gradient, 2, 2, rng);
  const Eigen::VectorXd va = a.values(), vb = b.values();
  CHECK(va.dot(mat * vb) == doctest::Approx(form_b(g, xi, kp, a, b)).epsilon(1e-12));
}

TEST_CASE("envelope check: no violations and the expected extremes") {
  const MetricField id = identity_metric(2);
  Point x = Point::Constant(2, 0.5);
  const EnvelopeReport rep = envelope_check(id, x, row(2, 0), KernelParams{2.0, 0.1, 0.0},
                                            20000, 9);
  CHECK(rep.violations == 0);
  CHECK(rep.lower == doctest::Approx(0.6));
  CHECK(rep.upper == doctest::Approx(1.1));
  CHECK(rep.min_ratio_low >= 0.6 - 1e-12);
  CHECK(rep.max_ratio_high <= 1.1 + 1e-12);
  CHECK(rep.min_ratio_low == doctest::Approx(0.6).epsilon(1e-2));
  CHECK(rep.max_ratio_high == doctest::Approx(1.1).epsilon(1e-2));

  const EnvelopeReport deg = envelope_check(id, x, row(0.5, 0), KernelParams{2.0, 0.2, 0.0},
                                            1000, 9);
  CHECK(deg.violations == 0);
  CHECK(deg.min_ratio_low == doctest::Approx(0.2));
  CHECK(deg.max_ratio_high == doctest::Approx(0.2));
}

TEST_CASE("envelope check across metrics, exponents and codomain sizes") {
  const MetricField m = rotation_metric(0.5, 3.0, 2.0);
  for (std::uint64_t k = 0; k < 60; ++k) {
    SampleRng rng(33, k);
    Point x(2);
    x << rng.uniform(), rng.uniform();
    GammaVector xi(2, 1 + rng.index(3));
    for (int j = 0; j < xi.size(); ++j) xi[j] = rng.normal() * rng.log_uniform(0.1, 10);
    const KernelParams kp{rng.uniform(1.2, 5.0), rng.uniform(0, 1), 0.0};
    if (std::abs(gamma_norm(m, x, xi) - 1.0) < 1e-6) continue;
    CHECK(envelope_check(m, x, xi, kp, 500, k).violations == 0);
  }
}
