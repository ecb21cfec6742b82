#pragma once

#include "degen/metric.hpp"

namespace degen {

/// Exponent p > 1, regularization eps in [0,1], truncation delta in [0,1].
struct KernelParams {
  double p = 2.0;
  double eps = 0.0;
  double delta = 0.0;

  /// Throws std::invalid_argument when an invariant is broken.
  void validate() const;
};

/// Scalar kernels evaluated at t >= 0. Everything vanishes for t < 1; at t == 1 with
/// 1 < p < 2 the derivative h' is reported as +infinity (its right limit).
struct KernelValues {
  double h = 0.0;
  double h_prime = 0.0;
  double g = 0.0;
  double g_prime = 0.0;
  double f_integrand = 0.0;
  double lambda_env = 0.0;
  double big_lambda_env = 0.0;
};

KernelValues eval_kernels(double t, const KernelParams& params);

// Individual kernels; all take t >= 0 and vanish on [0, 1].
double kernel_h(double t, double p);
double kernel_h_prime(double t, double p);
double kernel_g(double t, double p);
double kernel_g_prime(double t, double p);
/// F(t) = (t-1)_+^p / p.
double integrand_f(double t, double p);
/// (p-1)(t-1)^{p-2} = h(t) + h'(t) t for t > 1.
double kernel_hh_t(double t, double p);
double lambda_env(double t, double p);
double big_lambda_env(double t, double p);

/// Conjugate of F on s >= 0: H(s) = s + s^q / q with 1/p + 1/q = 1.
double conjugate_h(double s, double p);

/// G_delta(x, xi) = (|xi|_gamma - 1 - delta)_+ / |xi|_gamma * xi; zero at xi = 0.
GammaVector truncated_gradient(const SpatialMatrix& g, const GammaVector& xi, double delta);
GammaVector truncated_gradient(const MetricField& m, const Point& x, const GammaVector& xi,
                               double delta);

/// A_eps(x, xi) = (h(|xi|_gamma) + eps) xi.
GammaVector vector_field_a(const SpatialMatrix& g, const GammaVector& xi,
                           const KernelParams& params);
GammaVector vector_field_a(const MetricField& m, const Point& x, const GammaVector& xi,
                           const KernelParams& params);

/// Max-norm of g(|xi|) xi - |G(x,xi)|^{p-1} G(x,xi).
double identity_check_g_pow(const MetricField& m, const Point& x, const GammaVector& xi, double p);

}  // namespace degen
