#pragma once

#include "degen/grid.hpp"
#include "degen/solver.hpp"

#include <functional>
#include <limits>
#include <vector>

namespace degen {

/// G_delta(x, Du) sampled at cell centres, with its gamma-norms.
struct TruncatedGradientField {
  Grid grid;
  double delta = 0.0;
  std::vector<GammaVector> values;
  std::vector<double> norms;
};

TruncatedGradientField g_delta_field(const Problem& problem, const NodalField& u, double delta);
/// U = (|Du|_gamma - 1 - delta)_+^2 per cell, computed from |Du|_gamma directly.
std::vector<double> u_eps_field(const Problem& problem, const NodalField& u, double delta);
/// Max over cells of the gamma-norm of a - b.
double max_field_distance(const Problem& problem, const TruncatedGradientField& a,
                          const TruncatedGradientField& b);

enum class Regime { degenerate, nondegenerate };
const char* regime_name(Regime r);

struct ExcessReport {
  Point x0;
  double rho = 0.0;
  int cells = 0;
  double phi = 0.0;        ///< mean |Du - (Du)_ball|^2
  double psi_delta = 0.0;  ///< mean |G_delta - (G_delta)_ball|^2
  double mu = 0.0;         ///< max over the ball of (|Du|_gamma - 1 - delta)_+
  double superlevel_fraction = 0.0;
  bool measure_nd = false;  ///< |B \ E| < nu |B|
  bool measure_d = false;   ///< |B \ E| >= nu |B|
  Regime regime = Regime::degenerate;
  /// Ball means of G_delta at radii rho, rho/2, rho/4; empty balls are skipped.
  std::vector<double> nested_radii;
  std::vector<GammaVector> nested_means;
};

/// Throws std::invalid_argument when no cell centre lies in the ball.
ExcessReport excess(const Problem& problem, const NodalField& u, const Point& x0, double rho,
                    double delta, double nu);

/// Mean of |G_delta - c|^2 over the ball for an arbitrary constant c.
double psi_about(const Problem& problem, const NodalField& u, const Point& x0, double rho,
                 double delta, const GammaVector& c);

struct HolderRow {
  double alpha = 0.0;
  double seminorm_fine = 0.0;
  double seminorm_coarse = 0.0;
  bool stable = false;  ///< fine / coarse < 1.1
};

struct HolderTable {
  std::vector<HolderRow> rows;
  double largest_stable_alpha = 0.0;  ///< 0 when no exponent is stable
};

/// sup over cell pairs with |x - y| <= max_dist of |f(x) - f(y)| / |x - y|^alpha.
std::vector<double> holder_seminorms(const TruncatedGradientField& field,
                                     const std::vector<double>& alphas, double max_dist);
HolderTable holder_estimate(const TruncatedGradientField& fine,
                            const TruncatedGradientField& coarse,
                            const std::vector<double>& alphas, double max_dist);

struct RateReport {
  std::vector<double> eps;
  std::vector<double> errors;  ///< integral of |G_delta(Du_eps) - G_delta(Du_ref)|^p_gamma
  double slope = 0.0;
  bool exact_match = false;  ///< every error below 1e-14; slope not fitted
};

/// Least-squares slope of log(error) against log(eps).
RateReport fit_rate(std::vector<double> eps, std::vector<double> errors);
/// Needs at least three states; the reference is not part of the fit.
RateReport convergence_rate(const Problem& problem, const std::vector<SolutionState>& states,
                            const SolutionState& reference, double delta);

using Closure = std::function<double(const Point&, const GammaVector&)>;

struct KComposition {
  std::vector<double> values;
  std::vector<double> radii;
  std::vector<double> modulus;  ///< omega(r): max |k(x) - k(y)| over pairs with |x - y| <= r
};

/// Applies k to (x_cell, Du(x_cell)). k is first spot-checked on random points of the
/// degenerate set; std::invalid_argument if it does not vanish there.
KComposition k_compose(const Problem& problem, const NodalField& u, const Closure& k,
                       const std::vector<double>& radii, std::uint64_t seed = 0);

}  // namespace degen
