#pragma once

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace degen {

/// Upper bounds on the spatial dimension n and codomain dimension N.
inline constexpr int kMaxDim = 3;
inline constexpr int kMaxCodim = 3;

using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using SpatialMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;
using GradMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor, kMaxCodim, kMaxDim>;

/// An element xi of R^{nN}; entry (i, alpha) is xi^i_alpha, flattened as i*n + alpha.
class GammaVector {
 public:
  GammaVector() = default;
  GammaVector(int n, int big_n);
  static GammaVector from_flat(int n, int big_n, std::span<const double> values);

  int n() const { return static_cast<int>(m_.cols()); }
  int big_n() const { return static_cast<int>(m_.rows()); }
  int size() const { return static_cast<int>(m_.size()); }

  double& operator()(int i, int alpha) { return m_(i, alpha); }
  double operator()(int i, int alpha) const { return m_(i, alpha); }
  double& operator[](int k) { return m_(k / n(), k % n()); }
  double operator[](int k) const { return m_(k / n(), k % n()); }

  const GradMatrix& mat() const { return m_; }
  GradMatrix& mat() { return m_; }

  /// Euclidean norm of the flattened entries.
  double euclidean_norm() const { return m_.norm(); }
  std::vector<double> flat() const;

  GammaVector& operator+=(const GammaVector& o);
  GammaVector& operator-=(const GammaVector& o);
  GammaVector& operator*=(double s);

 private:
  GradMatrix m_;
};

GammaVector operator+(GammaVector a, const GammaVector& b);
GammaVector operator-(GammaVector a, const GammaVector& b);
GammaVector operator*(double s, GammaVector a);

/// Symmetric, coercive, Lipschitz coefficient field gamma(x) on the unit cube [0,1]^n.
class MetricField {
 public:
  using Evaluator = std::function<SpatialMatrix(const Point&)>;

  MetricField(std::string name, int dim_n, Evaluator eval, double c0, double c1, double c2);

  const std::string& name() const { return name_; }
  int dim() const { return dim_n_; }
  double c0() const { return c0_; }
  double c1() const { return c1_; }
  double c2() const { return c2_; }
  /// True when gamma does not depend on x.
  bool is_constant() const { return constant_; }
  void set_constant(bool c) { constant_ = c; }

  /// Throws std::out_of_range outside the closed unit cube.
  SpatialMatrix eval(const Point& x) const;

 private:
  std::string name_;
  int dim_n_;
  Evaluator eval_;
  double c0_, c1_, c2_;
  bool constant_ = false;
};

// Built-in metric library.
MetricField identity_metric(int dim_n);
MetricField diagonal_metric(std::vector<double> diag);
/// gamma(x) = R(theta) diag(l1, l2) R(theta)^T with theta = omega * (x1 + x2); n = 2 only.
MetricField rotation_metric(double l1, double l2, double omega);
/// gamma(x) = diag(1 + slope * x1, 1, ...).
MetricField affine_diagonal_metric(int dim_n, double slope);
/// Look up a library metric by name; params are interpreted per metric.
MetricField make_metric(const std::string& name, int dim_n, const std::vector<double>& params);

SpatialMatrix metric_eval(const MetricField& m, const Point& x);
double gamma_inner(const SpatialMatrix& g, const GammaVector& xi, const GammaVector& eta);
double gamma_inner(const MetricField& m, const Point& x, const GammaVector& xi,
                   const GammaVector& eta);
double gamma_norm(const SpatialMatrix& g, const GammaVector& xi);
double gamma_norm(const MetricField& m, const Point& x, const GammaVector& xi);

struct MetricValidation {
  bool symmetry_ok = true;
  double c0_emp = 0.0;
  double c1_emp = 0.0;
  double c2_emp = 0.0;
  bool c0_ok = true;
  bool c1_ok = true;
  bool c2_ok = true;
  bool ok() const { return symmetry_ok && c0_ok && c1_ok && c2_ok; }
};

/// Sweeps the sample points: eigenvalue extremes give c0/c1, central differences with
/// step fd_step (one-sided at the boundary) give c2. Violations are flagged, not thrown.
MetricValidation validate_metric(const MetricField& m, std::span<const Point> samples,
                                 double fd_step, double tol = 1e-9);

/// Tensor-product sample grid with `per_axis` points per axis on [0,1]^n.
std::vector<Point> sample_grid(int dim_n, int per_axis);

}  // namespace degen
