#include "degen/diagnostics.hpp"

#include "degen/kernel.hpp"
#include "degen/parallel.hpp"
#include "degen/random.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace degen {

TruncatedGradientField g_delta_field(const Problem& problem, const NodalField& u, double delta) {
  const Grid& grid = problem.grid();
  TruncatedGradientField f{grid, delta, {}, {}};
  f.values.resize(grid.num_cells());
  f.norms.resize(grid.num_cells());
  parallel_for(0, grid.num_cells(), [&](std::int64_t c) {
    const SpatialMatrix& g = problem.cell_metric(static_cast<int>(c));
    f.values[c] = truncated_gradient(g, cell_gradient(u, static_cast<int>(c)), delta);
    f.norms[c] = gamma_norm(g, f.values[c]);
  });
  return f;
}

std::vector<double> u_eps_field(const Problem& problem, const NodalField& u, double delta) {
  const Grid& grid = problem.grid();
  std::vector<double> out(grid.num_cells());
  for (int c = 0; c < grid.num_cells(); ++c) {
    const double t = gamma_norm(problem.cell_metric(c), cell_gradient(u, c));
    const double e = std::max(0.0, t - 1.0 - delta);
    out[c] = e * e;
  }
  return out;
}

double max_field_distance(const Problem& problem, const TruncatedGradientField& a,
                          const TruncatedGradientField& b) {
  if (a.values.size() != b.values.size()) throw std::invalid_argument("field size mismatch");
  double m = 0.0;
  for (std::size_t c = 0; c < a.values.size(); ++c) {
    m = std::max(m, gamma_norm(problem.cell_metric(static_cast<int>(c)), a.values[c] - b.values[c]));
  }
  return m;
}

const char* regime_name(Regime r) {
  return r == Regime::degenerate ? "degenerate" : "nondegenerate";
}

namespace {

GammaVector ball_mean(const std::vector<GammaVector>& v, const std::vector<int>& cells) {
  GammaVector m(v[cells.front()].n(), v[cells.front()].big_n());
  for (int c : cells) m += v[c];
  m *= 1.0 / static_cast<double>(cells.size());
  return m;
}

double mean_sq_dev(const std::vector<GammaVector>& v, const std::vector<int>& cells,
                   const GammaVector& c0) {
  double s = 0.0;
  for (int c : cells) {
    const double d = (v[c] - c0).euclidean_norm();
    s += d * d;
  }
  return s / static_cast<double>(cells.size());
}

std::vector<int> ball_or_throw(const Grid& grid, const Point& x0, double rho) {
  auto cells = grid.cells_in_ball(x0, rho);
  if (cells.empty()) throw std::invalid_argument("excess: ball contains no cell centre");
  return cells;
}

}  // namespace

ExcessReport excess(const Problem& problem, const NodalField& u, const Point& x0, double rho,
                    double delta, double nu) {
  if (!(nu > 0.0 && nu < 1.0)) throw std::invalid_argument("excess: nu must lie in (0,1)");
  const Grid& grid = problem.grid();
  const std::vector<int> cells = ball_or_throw(grid, x0, rho);

  std::vector<GammaVector> du(grid.num_cells()), gd(grid.num_cells());
  std::vector<double> t(grid.num_cells(), 0.0);
  for (int c : cells) {
    du[c] = cell_gradient(u, c);
    t[c] = gamma_norm(problem.cell_metric(c), du[c]);
    gd[c] = truncated_gradient(problem.cell_metric(c), du[c], delta);
  }

  ExcessReport rep;
  rep.x0 = x0;
  rep.rho = rho;
  rep.cells = static_cast<int>(cells.size());
  rep.phi = mean_sq_dev(du, cells, ball_mean(du, cells));
  rep.psi_delta = mean_sq_dev(gd, cells, ball_mean(gd, cells));
  for (int c : cells) rep.mu = std::max(rep.mu, std::max(0.0, t[c] - 1.0 - delta));

  int in_level = 0;
  for (int c : cells) in_level += t[c] - 1.0 - delta > (1.0 - nu) * rep.mu ? 1 : 0;
  rep.superlevel_fraction = static_cast<double>(in_level) / rep.cells;

  // both measure conditions evaluated on |B \ E| in units of cell volume
  const double outside = grid.cell_volume() * (rep.cells - in_level);
  const double ball = grid.cell_volume() * rep.cells;
  rep.measure_nd = outside < nu * ball;
  rep.measure_d = outside >= nu * ball;
  rep.regime = 1.0 - rep.superlevel_fraction < nu ? Regime::nondegenerate : Regime::degenerate;

  for (double r : {rho, rho / 2, rho / 4}) {
    const auto inner = grid.cells_in_ball(x0, r);
    if (inner.empty()) continue;
    rep.nested_radii.push_back(r);
    rep.nested_means.push_back(ball_mean(gd, inner));
  }
  return rep;
}

double psi_about(const Problem& problem, const NodalField& u, const Point& x0, double rho,
                 double delta, const GammaVector& c0) {
  const std::vector<int> cells = ball_or_throw(problem.grid(), x0, rho);
  std::vector<GammaVector> gd(problem.grid().num_cells());
  for (int c : cells) {
    gd[c] = truncated_gradient(problem.cell_metric(c), cell_gradient(u, c), delta);
  }
  return mean_sq_dev(gd, cells, c0);
}

std::vector<double> holder_seminorms(const TruncatedGradientField& field,
                                     const std::vector<double>& alphas, double max_dist) {
  const Grid& grid = field.grid;
  const int cells = grid.num_cells();
  if (cells < 2) throw std::invalid_argument("holder: need at least two cells");
  if (static_cast<int>(field.values.size()) != cells) {
    throw std::invalid_argument("holder: field does not match its grid");
  }
  const std::size_t na = alphas.size();
  std::vector<Point> centre(cells);
  for (int c = 0; c < cells; ++c) centre[c] = grid.cell_center(c);
  std::vector<double> row_max(static_cast<std::size_t>(cells) * na, 0.0);
  parallel_for(0, cells, [&](std::int64_t i) {
    for (int j = static_cast<int>(i) + 1; j < cells; ++j) {
      const double d = (centre[i] - centre[j]).norm();
      if (d > max_dist) continue;
      const double diff = (field.values[i] - field.values[j]).euclidean_norm();
      if (diff == 0.0) continue;
      for (std::size_t a = 0; a < na; ++a) {
        double& slot = row_max[i * na + a];
        slot = std::max(slot, diff / std::pow(d, alphas[a]));
      }
    }
  });
  std::vector<double> out(na, 0.0);
  for (int i = 0; i < cells; ++i)
    for (std::size_t a = 0; a < na; ++a) out[a] = std::max(out[a], row_max[i * na + a]);
  return out;
}

HolderTable holder_estimate(const TruncatedGradientField& fine,
                            const TruncatedGradientField& coarse,
                            const std::vector<double>& alphas, double max_dist) {
  const auto sf = holder_seminorms(fine, alphas, max_dist);
  const auto sc = holder_seminorms(coarse, alphas, max_dist);
  HolderTable table;
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    HolderRow row{alphas[a], sf[a], sc[a], false};
    row.stable = sf[a] == 0.0 || (sc[a] > 0.0 && sf[a] / sc[a] < 1.1);
    if (row.stable) table.largest_stable_alpha = std::max(table.largest_stable_alpha, alphas[a]);
    table.rows.push_back(row);
  }
  return table;
}

RateReport fit_rate(std::vector<double> eps, std::vector<double> errors) {
  if (eps.size() != errors.size() || eps.size() < 2) {
    throw std::invalid_argument("fit_rate: need matching eps/error lists of length >= 2");
  }
  RateReport r;
  r.eps = std::move(eps);
  r.errors = std::move(errors);
  if (std::all_of(r.errors.begin(), r.errors.end(), [](double e) { return e < 1e-14; })) {
    r.exact_match = true;
    return r;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t k = 0; k < r.eps.size(); ++k) {
    if (!(r.errors[k] > 0.0)) continue;
    const double x = std::log(r.eps[k]), y = std::log(r.errors[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) throw std::invalid_argument("fit_rate: fewer than two positive errors");
  r.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return r;
}

RateReport convergence_rate(const Problem& problem, const std::vector<SolutionState>& states,
                            const SolutionState& reference, double delta) {
  if (states.size() < 3) throw std::invalid_argument("convergence_rate: need >= 3 states");
  const TruncatedGradientField ref = g_delta_field(problem, reference.u, delta);
  const Grid& grid = problem.grid();
  std::vector<double> eps, errors;
  for (const SolutionState& st : states) {
    const TruncatedGradientField f = g_delta_field(problem, st.u, delta);
    std::vector<double> cell(grid.num_cells());
    for (int c = 0; c < grid.num_cells(); ++c) {
      cell[c] = std::pow(gamma_norm(problem.cell_metric(c), f.values[c] - ref.values[c]),
                         problem.p());
    }
    eps.push_back(st.eps);
    errors.push_back(integrate(grid, cell));
  }
  return fit_rate(std::move(eps), std::move(errors));
}

KComposition k_compose(const Problem& problem, const NodalField& u, const Closure& k,
                       const std::vector<double>& radii, std::uint64_t seed) {
  const Grid& grid = problem.grid();
  const int n = grid.n(), big_n = problem.big_n();
  for (std::uint64_t s = 0; s < 256; ++s) {
    SampleRng rng(seed, s);
    Point x(n);
    for (int a = 0; a < n; ++a) x[a] = rng.uniform();
    GammaVector xi(n, big_n);
    for (int j = 0; j < xi.size(); ++j) xi[j] = rng.normal();
    const double t = gamma_norm(problem.metric(), x, xi);
    if (t > 0.0) xi *= rng.uniform() / t;
    if (std::abs(k(x, xi)) > 1e-12) {
      throw std::invalid_argument("k_compose: closure does not vanish on |xi|_gamma <= 1");
    }
  }
  KComposition out;
  out.values.resize(grid.num_cells());
  for (int c = 0; c < grid.num_cells(); ++c) {
    out.values[c] = k(grid.cell_center(c), cell_gradient(u, c));
  }
  out.radii = radii;
  std::sort(out.radii.begin(), out.radii.end());
  const int cells = grid.num_cells();
  const std::size_t nr = out.radii.size();
  std::vector<double> row_max(static_cast<std::size_t>(cells) * nr, 0.0);
  parallel_for(0, cells, [&](std::int64_t i) {
    const Point xi = grid.cell_center(static_cast<int>(i));
    for (int j = static_cast<int>(i) + 1; j < cells; ++j) {
      const double d = (xi - grid.cell_center(j)).norm();
      const double diff = std::abs(out.values[i] - out.values[j]);
      for (std::size_t r = 0; r < nr; ++r) {
        if (d <= out.radii[r]) row_max[i * nr + r] = std::max(row_max[i * nr + r], diff);
      }
    }
  });
  out.modulus.assign(nr, 0.0);
  for (int i = 0; i < cells; ++i)
    for (std::size_t r = 0; r < nr; ++r) out.modulus[r] = std::max(out.modulus[r], row_max[i * nr + r]);
  return out;
}

}  // namespace degen
