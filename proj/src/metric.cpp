#include "degen/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace degen {

GammaVector::GammaVector(int n, int big_n) {
  if (n < 1 || n > kMaxDim || big_n < 1 || big_n > kMaxCodim) {
    throw std::invalid_argument("GammaVector: dimensions out of range");
  }
  m_.setZero(big_n, n);
}

GammaVector GammaVector::from_flat(int n, int big_n, std::span<const double> values) {
  GammaVector v(n, big_n);
  if (static_cast<int>(values.size()) != n * big_n) {
    throw std::invalid_argument("GammaVector: length must equal n * N");
  }
  for (int k = 0; k < n * big_n; ++k) v[k] = values[k];
  return v;
}

std::vector<double> GammaVector::flat() const {
  std::vector<double> out(size());
  for (int k = 0; k < size(); ++k) out[k] = (*this)[k];
  return out;
}

GammaVector& GammaVector::operator+=(const GammaVector& o) {
  if (o.n() != n() || o.big_n() != big_n()) throw std::invalid_argument("dimension mismatch");
  m_ += o.m_;
  return *this;
}

GammaVector& GammaVector::operator-=(const GammaVector& o) {
  if (o.n() != n() || o.big_n() != big_n()) throw std::invalid_argument("dimension mismatch");
  m_ -= o.m_;
  return *this;
}

GammaVector& GammaVector::operator*=(double s) {
  m_ *= s;
  return *this;
}

GammaVector operator+(GammaVector a, const GammaVector& b) { return a += b; }
GammaVector operator-(GammaVector a, const GammaVector& b) { return a -= b; }
GammaVector operator*(double s, GammaVector a) { return a *= s; }

MetricField::MetricField(std::string name, int dim_n, Evaluator eval, double c0, double c1,
                         double c2)
    : name_(std::move(name)), dim_n_(dim_n), eval_(std::move(eval)), c0_(c0), c1_(c1), c2_(c2) {
  if (dim_n < 1 || dim_n > kMaxDim) throw std::invalid_argument("metric: unsupported dimension");
  if (!(c0 > 0.0) || c1 < c0 || c2 < 0.0) {
    throw std::invalid_argument("metric: need 0 < c0 <= c1 and c2 >= 0");
  }
}

SpatialMatrix MetricField::eval(const Point& x) const {
  if (x.size() != dim_n_) throw std::invalid_argument("metric: point has wrong dimension");
  constexpr double slack = 1e-12;
  for (int a = 0; a < dim_n_; ++a) {
    if (!(x[a] >= -slack && x[a] <= 1.0 + slack)) {
      throw std::out_of_range("metric: point outside the unit cube");
    }
  }
  return eval_(x);
}

MetricField identity_metric(int dim_n) {
  MetricField m(
      "identity", dim_n, [dim_n](const Point&) { return SpatialMatrix::Identity(dim_n, dim_n); },
      1.0, 1.0, 0.0);
  m.set_constant(true);
  return m;
}

MetricField diagonal_metric(std::vector<double> diag) {
  if (diag.empty()) throw std::invalid_argument("diagonal metric: empty diagonal");
  const auto [lo, hi] = std::minmax_element(diag.begin(), diag.end());
  const double c0 = *lo, c1 = *hi;
  const int n = static_cast<int>(diag.size());
  MetricField m(
      "diagonal", n,
      [diag = std::move(diag), n](const Point&) {
        SpatialMatrix g = SpatialMatrix::Zero(n, n);
        for (int a = 0; a < n; ++a) g(a, a) = diag[a];
        return g;
      },
      c0, c1, 0.0);
  m.set_constant(true);
  return m;
}

MetricField rotation_metric(double l1, double l2, double omega) {
  if (!(l1 > 0.0 && l2 > 0.0)) throw std::invalid_argument("rotation metric: eigenvalues > 0");
  const double c0 = std::min(l1, l2), c1 = std::max(l1, l2);
  // d(gamma_ab)/d(theta) has modulus |l2 - l1| |sin 2theta| or |cos 2theta|, and
  // |grad theta| = sqrt(2) |omega|.
  const double c2 = std::abs(l2 - l1) * std::abs(omega) * std::sqrt(2.0);
  MetricField m(
      "rotation", 2,
      [=](const Point& x) {
        const double th = omega * (x[0] + x[1]);
        const double c = std::cos(th), s = std::sin(th);
        SpatialMatrix g(2, 2);
        g(0, 0) = l1 * c * c + l2 * s * s;
        g(1, 1) = l1 * s * s + l2 * c * c;
        g(0, 1) = g(1, 0) = (l1 - l2) * c * s;
        return g;
      },
      c0, c1, c2);
  m.set_constant(omega == 0.0);
  return m;
}

MetricField affine_diagonal_metric(int dim_n, double slope) {
  if (!(1.0 + slope > 0.0)) throw std::invalid_argument("affine metric: 1 + slope must be > 0");
  const double c0 = std::min(1.0, 1.0 + slope), c1 = std::max(1.0, 1.0 + slope);
  MetricField m(
      "affine", dim_n,
      [=](const Point& x) {
        SpatialMatrix g = SpatialMatrix::Identity(dim_n, dim_n);
        g(0, 0) = 1.0 + slope * x[0];
        return g;
      },
      c0, c1, std::abs(slope));
  m.set_constant(slope == 0.0);
  return m;
}

MetricField make_metric(const std::string& name, int dim_n, const std::vector<double>& params) {
  auto need = [&](std::size_t k) {
    if (params.size() != k) {
      throw std::invalid_argument("metric '" + name + "' expects " + std::to_string(k) +
                                  " parameter(s)");
    }
  };
  if (name == "identity") {
    need(0);
    return identity_metric(dim_n);
  }
  if (name == "diagonal") {
    need(static_cast<std::size_t>(dim_n));
    return diagonal_metric(params);
  }
  if (name == "rotation") {
    if (dim_n != 2) throw std::invalid_argument("rotation metric requires dim = 2");
    need(3);
    return rotation_metric(params[0], params[1], params[2]);
  }
  if (name == "affine") {
    need(1);
    return affine_diagonal_metric(dim_n, params[0]);
  }
  throw std::invalid_argument("unknown metric '" + name + "'");
}

SpatialMatrix metric_eval(const MetricField& m, const Point& x) { return m.eval(x); }

double gamma_inner(const SpatialMatrix& g, const GammaVector& xi, const GammaVector& eta) {
  if (xi.n() != eta.n() || xi.big_n() != eta.big_n() || xi.n() != g.rows()) {
    throw std::invalid_argument("gamma_inner: dimension mismatch");
  }
  // sum_i xi_i^T gamma eta_i
  return ((xi.mat() * g).cwiseProduct(eta.mat())).sum();
}

double gamma_inner(const MetricField& m, const Point& x, const GammaVector& xi,
                   const GammaVector& eta) {
  return gamma_inner(m.eval(x), xi, eta);
}

double gamma_norm(const SpatialMatrix& g, const GammaVector& xi) {
  return std::sqrt(std::max(0.0, gamma_inner(g, xi, xi)));
}

double gamma_norm(const MetricField& m, const Point& x, const GammaVector& xi) {
  return gamma_norm(m.eval(x), xi);
}

std::vector<Point> sample_grid(int dim_n, int per_axis) {
  if (per_axis < 2) throw std::invalid_argument("sample_grid: need at least 2 points per axis");
  std::vector<Point> pts;
  int total = 1;
  for (int a = 0; a < dim_n; ++a) total *= per_axis;
  pts.reserve(total);
  for (int k = 0; k < total; ++k) {
    Point x(dim_n);
    int r = k;
    for (int a = 0; a < dim_n; ++a) {
      x[a] = static_cast<double>(r % per_axis) / (per_axis - 1);
      r /= per_axis;
    }
    pts.push_back(x);
  }
  return pts;
}

MetricValidation validate_metric(const MetricField& m, std::span<const Point> samples,
                                 double fd_step, double tol) {
  if (!(fd_step > 0.0)) throw std::invalid_argument("validate_metric: fd_step must be > 0");
  MetricValidation rep;
  const int n = m.dim();
  rep.c0_emp = std::numeric_limits<double>::infinity();
  rep.c1_emp = 0.0;
  for (const Point& x : samples) {
    const SpatialMatrix g = m.eval(x);
    const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
    if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-14 * scale) rep.symmetry_ok = false;
    Eigen::SelfAdjointEigenSolver<SpatialMatrix> es(0.5 * (g + g.transpose()),
                                                    Eigen::EigenvaluesOnly);
    rep.c0_emp = std::min(rep.c0_emp, es.eigenvalues().minCoeff());
    rep.c1_emp = std::max(rep.c1_emp, es.eigenvalues().maxCoeff());

    // gradient of every entry
    std::vector<SpatialMatrix> dg(n);
    for (int s = 0; s < n; ++s) {
      Point xp = x, xm = x;
      xp[s] = std::min(1.0, x[s] + fd_step);
      xm[s] = std::max(0.0, x[s] - fd_step);
      dg[s] = (m.eval(xp) - m.eval(xm)) / (xp[s] - xm[s]);
    }
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        double sq = 0.0;
        for (int s = 0; s < n; ++s) sq += dg[s](a, b) * dg[s](a, b);
        rep.c2_emp = std::max(rep.c2_emp, std::sqrt(sq));
      }
    }
  }
  if (samples.empty()) rep.c0_emp = 0.0;
  rep.c0_ok = rep.c0_emp >= m.c0() * (1.0 - tol);
  rep.c1_ok = rep.c1_emp <= m.c1() * (1.0 + tol);
  rep.c2_ok = rep.c2_emp <= m.c2() * (1.0 + tol) + tol;
  return rep;
}

}  // namespace degen
