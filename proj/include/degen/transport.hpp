#pragma once

#include "degen/grid.hpp"
#include "degen/solver.hpp"

#include <vector>

namespace degen {

/// Congested traffic flow sigma = D_xi F(Du) = h(|Du|) Du of a scalar solution.
struct FlowField {
  Grid grid;
  double p = 2.0;
  std::vector<Point> sigma;
  std::vector<double> sigma_norm;
  std::vector<double> congestion_cost;  ///< H(|sigma|)
  std::vector<double> primal_density;   ///< F(|Du|)
  std::vector<double> pairing_density;  ///< sigma . Du
  std::vector<double> fy_residual;      ///< F(|Du|) + H(|sigma|) - sigma . Du
};

/// Pointwise Fenchel-Young defect F(|xi|) + H(|s|) - s . xi, nonnegative for every pair.
double fenchel_young_defect(const Point& xi, const Point& s, double p);

/// Requires big_n = 1 and gamma = identity; std::invalid_argument otherwise.
FlowField traffic_flow(const Problem& problem, const NodalField& u);

struct DualityReport {
  double primal_energy = 0.0;  ///< integral of F(|Du|)
  double dual_energy = 0.0;    ///< integral of H(|sigma|)
  double pairing = 0.0;        ///< integral of sigma . Du
  double div_norm = 0.0;       ///< max interior |div sigma|
  double max_fy_residual = 0.0;
  double min_fy_residual = 0.0;
};

DualityReport duality_report(const FlowField& flow);

}  // namespace degen
