#pragma once

#include "degen/kernel.hpp"
#include "degen/metric.hpp"

#include <cstdint>

namespace degen {

enum class FormSpace { second_gradient, gradient, spatial };

/// Operand of the bilinear forms. Layouts:
///   second_gradient: eta^i_{alpha nu} at (i*n + alpha)*n + nu   (length n^2 N)
///   gradient:        eta^i_alpha at i*n + alpha                  (length n N)
///   spatial:         eta_alpha                                   (length n)
class FormOperand {
 public:
  using Storage = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxCodim * kMaxDim * kMaxDim, 1>;

  FormOperand(FormSpace space, int n, int big_n);
  static FormOperand from_gradient(const GammaVector& v);

  FormSpace space() const { return space_; }
  int n() const { return n_; }
  int big_n() const { return big_n_; }
  int size() const { return static_cast<int>(v_.size()); }

  double& operator[](int k) { return v_[k]; }
  double operator[](int k) const { return v_[k]; }
  double& at(int i, int alpha, int nu) { return v_[(i * n_ + alpha) * n_ + nu]; }
  double at(int i, int alpha, int nu) const { return v_[(i * n_ + alpha) * n_ + nu]; }

  const Storage& values() const { return v_; }
  Storage& values() { return v_; }

  /// View of a gradient-space operand as a GammaVector.
  GammaVector as_gradient() const;

 private:
  FormSpace space_;
  int n_, big_n_;
  Storage v_;
};

/// |eta|^2_gamma in the operand's own space (gamma applied to every spatial index).
double operand_norm_sq(const SpatialMatrix& g, const FormOperand& eta);

// The three forms. Requires xi != 0 and, for 1 < p < 2, |xi|_gamma != 1; throws
// std::domain_error otherwise. When |xi|_gamma <= 1 the rank-one part is dropped.
double form_a(const SpatialMatrix& g, const GammaVector& xi, const KernelParams& params,
              const FormOperand& eta, const FormOperand& zeta);
double form_b(const SpatialMatrix& g, const GammaVector& xi, const KernelParams& params,
              const FormOperand& eta, const FormOperand& zeta);
double form_c(const SpatialMatrix& g, const GammaVector& xi, const KernelParams& params,
              const FormOperand& eta, const FormOperand& zeta);

double form_a(const MetricField& m, const Point& x, const GammaVector& xi,
              const KernelParams& params, const FormOperand& eta, const FormOperand& zeta);
double form_b(const MetricField& m, const Point& x, const GammaVector& xi,
              const KernelParams& params, const FormOperand& eta, const FormOperand& zeta);
double form_c(const MetricField& m, const Point& x, const GammaVector& xi,
              const KernelParams& params, const FormOperand& eta, const FormOperand& zeta);

/// Dense matrix of form_b on R^{nN} in the flat GammaVector layout; this is the Hessian of
/// xi -> F(|xi|_gamma) + eps |xi|^2_gamma / 2.
Eigen::MatrixXd form_b_matrix(const SpatialMatrix& g, const GammaVector& xi,
                              const KernelParams& params);

struct EnvelopeReport {
  double min_ratio_low = 0.0;   ///< min over samples of form(eta,eta) / |eta|^2_gamma
  double max_ratio_high = 0.0;  ///< max over samples of form(eta,eta) / |eta|^2_gamma
  double lower = 0.0;           ///< eps + lambda(|xi|_gamma)
  double upper = 0.0;           ///< eps + Lambda(|xi|_gamma)
  std::int64_t samples = 0;
  std::int64_t violations = 0;
};

/// Random eta in all three spaces; counts violations of the two-sided ellipticity bound at
/// relative tolerance rel_tol.
EnvelopeReport envelope_check(const MetricField& m, const Point& x, const GammaVector& xi,
                              const KernelParams& params, std::int64_t samples,
                              std::uint64_t seed, double rel_tol = 1e-10);

}  // namespace degen
