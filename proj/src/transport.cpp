#include "degen/transport.hpp"

#include "degen/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace degen {

double fenchel_young_defect(const Point& xi, const Point& s, double p) {
  return integrand_f(xi.norm(), p) + conjugate_h(s.norm(), p) - s.dot(xi);
}

FlowField traffic_flow(const Problem& problem, const NodalField& u) {
  if (problem.big_n() != 1) throw std::invalid_argument("traffic_flow: requires big_n = 1");
  const Grid& grid = problem.grid();
  const int n = grid.n();
  for (int c = 0; c < grid.num_cells(); ++c) {
    if (!problem.cell_metric(c).isIdentity(0.0)) {
      throw std::invalid_argument("traffic_flow: requires the identity metric");
    }
  }
  const double p = problem.p();
  FlowField f{grid, p, {}, {}, {}, {}, {}, {}};
  const auto cells = static_cast<std::size_t>(grid.num_cells());
  f.sigma.resize(cells);
  f.sigma_norm.resize(cells);
  f.congestion_cost.resize(cells);
  f.primal_density.resize(cells);
  f.pairing_density.resize(cells);
  f.fy_residual.resize(cells);
  for (int c = 0; c < grid.num_cells(); ++c) {
    const GammaVector du = cell_gradient(u, c);
    Point xi(n);
    for (int a = 0; a < n; ++a) xi[a] = du(0, a);
    const double t = xi.norm();
    f.sigma[c] = kernel_h(t, p) * xi;
    f.sigma_norm[c] = f.sigma[c].norm();
    f.congestion_cost[c] = conjugate_h(f.sigma_norm[c], p);
    f.primal_density[c] = integrand_f(t, p);
    f.pairing_density[c] = f.sigma[c].dot(xi);
    f.fy_residual[c] = f.primal_density[c] + f.congestion_cost[c] - f.pairing_density[c];
  }
  return f;
}

DualityReport duality_report(const FlowField& flow) {
  const Grid& grid = flow.grid;
  DualityReport r;
  r.primal_energy = integrate(grid, flow.primal_density);
  r.dual_energy = integrate(grid, flow.congestion_cost);
  r.pairing = integrate(grid, flow.pairing_density);
  CellGradField flux(grid, 1);
  for (int c = 0; c < grid.num_cells(); ++c)
    for (int a = 0; a < grid.n(); ++a) flux.entry(c, 0, a) = flow.sigma[c][a];
  const NodalField div = divergence(flux);
  for (int node = 0; node < grid.num_nodes(); ++node) {
    if (!grid.is_boundary(node)) r.div_norm = std::max(r.div_norm, std::abs(div(node, 0)));
  }
  if (!flow.fy_residual.empty()) {
    r.max_fy_residual = *std::max_element(flow.fy_residual.begin(), flow.fy_residual.end());
    r.min_fy_residual = *std::min_element(flow.fy_residual.begin(), flow.fy_residual.end());
  }
  return r;
}

}  // namespace degen
