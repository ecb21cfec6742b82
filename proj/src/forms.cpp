#include "degen/forms.hpp"

#include "degen/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace degen {

namespace {

int space_length(FormSpace space, int n, int big_n) {
  switch (space) {
    case FormSpace::second_gradient:
      return n * n * big_n;
    case FormSpace::gradient:
      return n * big_n;
    case FormSpace::spatial:
      return n;
  }
  return 0;
}

struct FormCoefficients {
  double h_eps;      // h(t) + eps
  double rank_one;   // h'(t) t / t^2
  GradMatrix w;      // w^i_alpha = (gamma xi^i)_alpha
};

FormCoefficients coefficients(const SpatialMatrix& g, const GammaVector& xi,
                              const KernelParams& params, bool allow_zero) {
  const double t = gamma_norm(g, xi);
  if (!allow_zero && t == 0.0) throw std::domain_error("bilinear forms need xi != 0");
  if (params.p < 2.0 && t == 1.0) {
    throw std::domain_error("bilinear forms undefined at |xi|_gamma = 1 for 1 < p < 2");
  }
  FormCoefficients c;
  c.h_eps = kernel_h(t, params.p) + params.eps;
  c.rank_one = t > 1.0 ? kernel_h_prime(t, params.p) / t : 0.0;
  c.w = xi.mat() * g;
  return c;
}

void check_operands(FormSpace space, const GammaVector& xi, const FormOperand& eta,
                    const FormOperand& zeta) {
  if (eta.space() != space || zeta.space() != space) {
    throw std::invalid_argument("form operand lives in the wrong space");
  }
  if (eta.n() != xi.n() || zeta.n() != xi.n() || eta.big_n() != xi.big_n() ||
      zeta.big_n() != xi.big_n()) {
    throw std::invalid_argument("form operand dimension mismatch");
  }
}

}  // namespace

FormOperand::FormOperand(FormSpace space, int n, int big_n)
    : space_(space), n_(n), big_n_(big_n) {
  if (n < 1 || n > kMaxDim || big_n < 1 || big_n > kMaxCodim) {
    throw std::invalid_argument("FormOperand: dimensions out of range");
  }
  v_.setZero(space_length(space, n, big_n));
}

FormOperand FormOperand::from_gradient(const GammaVector& v) {
  FormOperand op(FormSpace::gradient, v.n(), v.big_n());
  for (int k = 0; k < v.size(); ++k) op[k] = v[k];
  return op;
}

GammaVector FormOperand::as_gradient() const {
  if (space_ != FormSpace::gradient) throw std::invalid_argument("operand is not a gradient");
  GammaVector v(n_, big_n_);
  for (int k = 0; k < size(); ++k) v[k] = v_[k];
  return v;
}

double operand_norm_sq(const SpatialMatrix& g, const FormOperand& eta) {
  const int n = eta.n();
  switch (eta.space()) {
    case FormSpace::spatial: {
      double s = 0.0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) s += g(a, b) * eta[a] * eta[b];
      return s;
    }
    case FormSpace::gradient:
      return gamma_inner(g, eta.as_gradient(), eta.as_gradient());
    case FormSpace::second_gradient: {
      double s = 0.0;
      for (int i = 0; i < eta.big_n(); ++i)
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            for (int nu = 0; nu < n; ++nu)
              for (int sg = 0; sg < n; ++sg)
                s += g(a, b) * g(nu, sg) * eta.at(i, a, nu) * eta.at(i, b, sg);
      return s;
    }
  }
  return 0.0;
}

double form_a(const SpatialMatrix& g, const GammaVector& xi, const KernelParams& params,
              const FormOperand& eta, const FormOperand& zeta) {
  check_operands(FormSpace::second_gradient, xi, eta, zeta);
  const FormCoefficients c = coefficients(g, xi, params, false);
  const int n = xi.n(), big_n = xi.big_n();
  double iso = 0.0;
  for (int i = 0; i < big_n; ++i)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int nu = 0; nu < n; ++nu)
          for (int sg = 0; sg < n; ++sg)
            iso += g(a, b) * g(nu, sg) * eta.at(i, a, nu) * zeta.at(i, b, sg);
  double rank = 0.0;
  if (c.rank_one != 0.0) {
    // contract the (i, alpha) slot with w, leaving a spatial vector indexed by nu
    Point ea = Point::Zero(n), za = Point::Zero(n);
    for (int i = 0; i < big_n; ++i)
      for (int a = 0; a < n; ++a)
        for (int nu = 0; nu < n; ++nu) {
          ea[nu] += c.w(i, a) * eta.at(i, a, nu);
          za[nu] += c.w(i, a) * zeta.at(i, a, nu);
        }
    rank = ea.dot(g * za);
  }
  return c.h_eps * iso + c.rank_one * rank;
}

double form_b(const SpatialMatrix& g, const GammaVector& xi, const KernelParams& params,
              const FormOperand& eta, const FormOperand& zeta) {
  check_operands(FormSpace::gradient, xi, eta, zeta);
  const FormCoefficients c = coefficients(g, xi, params, false);
  const GammaVector e = eta.as_gradient(), z = zeta.as_gradient();
  double value = c.h_eps * gamma_inner(g, e, z);
  if (c.rank_one != 0.0) {
    value += c.rank_one * c.w.cwiseProduct(e.mat()).sum() * c.w.cwiseProduct(z.mat()).sum();
  }
  return value;
}

double form_c(const SpatialMatrix& g, const GammaVector& xi, const KernelParams& params,
              const FormOperand& eta, const FormOperand& zeta) {
  check_operands(FormSpace::spatial, xi, eta, zeta);
  const FormCoefficients c = coefficients(g, xi, params, false);
  const int n = xi.n();
  Point e(n), z(n);
  for (int a = 0; a < n; ++a) {
    e[a] = eta[a];
    z[a] = zeta[a];
  }
  double value = c.h_eps * e.dot(g * z);
  if (c.rank_one != 0.0) {
    // codomain index contracted diagonally: sum_i (w^i . eta)(w^i . zeta)
    for (int i = 0; i < xi.big_n(); ++i) {
      value += c.rank_one * c.w.row(i).dot(e.transpose()) * c.w.row(i).dot(z.transpose());
    }
  }
  return value;
}

double form_a(const MetricField& m, const Point& x, const GammaVector& xi,
              const KernelParams& params, const FormOperand& eta, const FormOperand& zeta) {
  return form_a(m.eval(x), xi, params, eta, zeta);
}

double form_b(const MetricField& m, const Point& x, const GammaVector& xi,
              const KernelParams& params, const FormOperand& eta, const FormOperand& zeta) {
  return form_b(m.eval(x), xi, params, eta, zeta);
}

double form_c(const MetricField& m, const Point& x, const GammaVector& xi,
              const KernelParams& params, const FormOperand& eta, const FormOperand& zeta) {
  return form_c(m.eval(x), xi, params, eta, zeta);
}

Eigen::MatrixXd form_b_matrix(const SpatialMatrix& g, const GammaVector& xi,
                              const KernelParams& params) {
  const FormCoefficients c = coefficients(g, xi, params, true);
  const int n = xi.n(), big_n = xi.big_n(), dim = n * big_n;
  Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < big_n; ++i)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) hess(i * n + a, i * n + b) = c.h_eps * g(a, b);
  if (c.rank_one != 0.0) {
    Eigen::VectorXd w(dim);
    for (int k = 0; k < dim; ++k) w[k] = c.w(k / n, k % n);
    hess += c.rank_one * w * w.transpose();
  }
  return hess;
}

EnvelopeReport envelope_check(const MetricField& m, const Point& x, const GammaVector& xi,
                              const KernelParams& params, std::int64_t samples,
                              std::uint64_t seed, double rel_tol) {
  const SpatialMatrix g = m.eval(x);
  const double t = gamma_norm(g, xi);
  EnvelopeReport rep;
  rep.lower = params.eps + lambda_env(t, params.p);
  rep.upper = params.eps + big_lambda_env(t, params.p);
  rep.min_ratio_low = std::numeric_limits<double>::infinity();
  rep.max_ratio_high = -std::numeric_limits<double>::infinity();
  const int n = xi.n(), big_n = xi.big_n();
  const FormSpace spaces[] = {FormSpace::second_gradient, FormSpace::gradient,
                              FormSpace::spatial};
  for (std::int64_t k = 0; k < samples; ++k) {
    SampleRng rng(seed, static_cast<std::uint64_t>(k));
    for (FormSpace space : spaces) {
      FormOperand eta(space, n, big_n);
      for (int j = 0; j < eta.size(); ++j) eta[j] = rng.normal();
      const double norm_sq = operand_norm_sq(g, eta);
      if (norm_sq == 0.0) continue;
      double value = 0.0;
      switch (space) {
        case FormSpace::second_gradient:
          value = form_a(g, xi, params, eta, eta);
          break;
        case FormSpace::gradient:
          value = form_b(g, xi, params, eta, eta);
          break;
        case FormSpace::spatial:
          value = form_c(g, xi, params, eta, eta);
          break;
      }
      const double ratio = value / norm_sq;
      rep.min_ratio_low = std::min(rep.min_ratio_low, ratio);
      rep.max_ratio_high = std::max(rep.max_ratio_high, ratio);
      ++rep.samples;
      if (ratio < rep.lower * (1.0 - rel_tol) || ratio > rep.upper * (1.0 + rel_tol)) {
        ++rep.violations;
      }
    }
  }
  return rep;
}

}  // namespace degen
