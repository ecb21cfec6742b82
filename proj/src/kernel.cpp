#include "degen/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace degen {

void KernelParams::validate() const {
  if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
  if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in [0,1]");
  if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in [0,1]");
}

namespace {

void check_t(double t) {
  if (!(t >= 0.0)) throw std::domain_error("kernel argument must be nonnegative");
}

}  // namespace

double kernel_h(double t, double p) {
  check_t(t);
  if (t <= 1.0) return 0.0;
  return std::pow(t - 1.0, p - 1.0) / t;
}

double kernel_h_prime(double t, double p) {
  check_t(t);
  if (t < 1.0) return 0.0;
  if (t == 1.0) {
    if (p < 2.0) return std::numeric_limits<double>::infinity();
    // right and left limits differ for p == 2; the degenerate side wins at t == 1
    return 0.0;
  }
  const double s = t - 1.0;
  return (p - 1.0) * std::pow(s, p - 2.0) / t - std::pow(s, p - 1.0) / (t * t);
}

double kernel_g(double t, double p) {
  check_t(t);
  if (t <= 1.0) return 0.0;
  return std::pow(t - 1.0, p) / t;
}

double kernel_g_prime(double t, double p) {
  check_t(t);
  if (t <= 1.0) return 0.0;
  const double s = t - 1.0;
  return p * std::pow(s, p - 1.0) / t - std::pow(s, p) / (t * t);
}

double integrand_f(double t, double p) {
  check_t(t);
  if (t <= 1.0) return 0.0;
  return std::pow(t - 1.0, p) / p;
}

double kernel_hh_t(double t, double p) {
  check_t(t);
  if (t <= 1.0) return 0.0;
  return (p - 1.0) * std::pow(t - 1.0, p - 2.0);
}

double lambda_env(double t, double p) {
  if (t <= 1.0) return 0.0;
  return std::min(kernel_h(t, p), kernel_hh_t(t, p));
}

double big_lambda_env(double t, double p) {
  if (t <= 1.0) return 0.0;
  return std::max(kernel_h(t, p), kernel_hh_t(t, p));
}

KernelValues eval_kernels(double t, const KernelParams& params) {
  check_t(t);
  const double p = params.p;
  KernelValues v;
  v.h = kernel_h(t, p);
  v.h_prime = kernel_h_prime(t, p);
  v.g = kernel_g(t, p);
  v.g_prime = kernel_g_prime(t, p);
  v.f_integrand = integrand_f(t, p);
  v.lambda_env = lambda_env(t, p);
  v.big_lambda_env = big_lambda_env(t, p);
  return v;
}

double conjugate_h(double s, double p) {
  if (!(s >= 0.0)) throw std::domain_error("conjugate_h: argument must be nonnegative");
  if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
  const double q = p / (p - 1.0);
  return s + std::pow(s, q) / q;
}

GammaVector truncated_gradient(const SpatialMatrix& g, const GammaVector& xi, double delta) {
  const double t = gamma_norm(g, xi);
  GammaVector out(xi.n(), xi.big_n());
  if (t <= 1.0 + delta) return out;
  out = xi;
  out *= (t - 1.0 - delta) / t;
  return out;
}

GammaVector truncated_gradient(const MetricField& m, const Point& x, const GammaVector& xi,
                               double delta) {
  return truncated_gradient(m.eval(x), xi, delta);
}

GammaVector vector_field_a(const SpatialMatrix& g, const GammaVector& xi,
                           const KernelParams& params) {
  const double t = gamma_norm(g, xi);
  GammaVector out = xi;
  out *= kernel_h(t, params.p) + params.eps;
  return out;
}

GammaVector vector_field_a(const MetricField& m, const Point& x, const GammaVector& xi,
                           const KernelParams& params) {
  return vector_field_a(m.eval(x), xi, params);
}

double identity_check_g_pow(const MetricField& m, const Point& x, const GammaVector& xi,
                            double p) {
  const SpatialMatrix g = m.eval(x);
  const double t = gamma_norm(g, xi);
  GammaVector lhs = xi;
  lhs *= kernel_g(t, p);
  GammaVector rhs = truncated_gradient(g, xi, 0.0);
  rhs *= std::pow(gamma_norm(g, rhs), p - 1.0);
  return (lhs - rhs).mat().cwiseAbs().maxCoeff();
}

}  // namespace degen
