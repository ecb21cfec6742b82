#include "degen/solver.hpp"

#include "degen/csv.hpp"
#include "degen/forms.hpp"
#include "degen/parallel.hpp"
#include "degen/random.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace degen {

// ---------------------------------------------------------------------------------------------
// Boundary data

BoundaryDatum make_datum(const std::string& id, const std::vector<double>& params, int n,
                         int big_n) {
  BoundaryDatum d{id, params, n, big_n, {}};
  auto need = [&](std::size_t k) {
    if (params.size() != k) {
      throw std::invalid_argument("datum '" + id + "' expects " + std::to_string(k) +
                                  " parameter(s)");
    }
  };
  if (id == "zero") {
    need(0);
    d.eval = [big_n](const Point&) { return std::vector<double>(big_n, 0.0); };
  } else if (id == "linear") {
    need(static_cast<std::size_t>(n * big_n));
    d.eval = [params, n, big_n](const Point& x) {
      std::vector<double> v(big_n, 0.0);
      for (int i = 0; i < big_n; ++i)
        for (int a = 0; a < n; ++a) v[i] += params[i * n + a] * x[a];
      return v;
    };
  } else if (id == "bilinear") {
    need(1);
    if (n != 2) throw std::invalid_argument("datum 'bilinear' requires dim = 2");
    const double c = params[0];
    d.eval = [c, big_n](const Point& x) { return std::vector<double>(big_n, c * x[0] * x[1]); };
  } else if (id == "quadratic") {
    need(2);
    const double a = params[0], b = params[1];
    d.eval = [a, b, n, big_n](const Point& x) {
      return std::vector<double>(big_n, a * x[0] * x[0] + b * x[n - 1]);
    };
  } else {
    throw std::invalid_argument("unknown datum '" + id + "'");
  }
  return d;
}

BoundaryDatum datum_from_field(const NodalField& u) {
  const Grid grid = u.grid();
  BoundaryDatum d{"stored", {}, grid.n(), u.big_n(), {}};
  d.eval = [u, grid](const Point& x) {
    int node = static_cast<int>(std::lround(x[0] / grid.h()));
    if (grid.n() == 2) node += grid.res() * static_cast<int>(std::lround(x[1] / grid.h()));
    std::vector<double> v(u.big_n());
    for (int i = 0; i < u.big_n(); ++i) v[i] = u(node, i);
    return v;
  };
  return d;
}

double datum_lipschitz(const BoundaryDatum& datum) {
  if (datum.id == "stored") return 1.0;
  const Grid sample(datum.n, 65);
  const NodalField u = interpolate(sample, datum.big_n, datum.eval);
  double lip = 0.0;
  for (int c = 0; c < sample.num_cells(); ++c) {
    lip = std::max(lip, cell_gradient(u, c).euclidean_norm());
  }
  return lip;
}

// ---------------------------------------------------------------------------------------------
// Problem

namespace {

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ',';
    s += fmt_double(v[k]);
  }
  return s;
}

}  // namespace

void ProblemSpec::validate() const {
  if (dim != 1 && dim != 2) throw std::invalid_argument("dim must be 1 or 2");
  if (res < 3) throw std::invalid_argument("res must be at least 3");
  if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
  if (big_n < 1 || big_n > kMaxCodim) throw std::invalid_argument("big_n out of range");
  for (std::size_t k = 0; k < eps_schedule.size(); ++k) {
    const double e = eps_schedule[k];
    if (!(e > 0.0 && e <= 1.0)) throw std::invalid_argument("eps_schedule entries must lie in (0,1]");
    if (k > 0 && !(e < eps_schedule[k - 1])) {
      throw std::invalid_argument("eps_schedule must be strictly decreasing");
    }
  }
  make_metric(metric, dim, metric_params);
  make_datum(datum, datum_params, dim, big_n);
}

std::string ProblemSpec::hash() const {
  std::ostringstream os;
  os << "dim=" << dim << ";res=" << res << ";metric=" << metric << '(' << join(metric_params)
     << ");p=" << fmt_double(p) << ";big_n=" << big_n << ";datum=" << datum << '('
     << join(datum_params) << ");schedule=" << join(eps_schedule);
  return fnv1a_hex(os.str());
}

Problem::Problem(const ProblemSpec& spec)
    : Problem(spec, make_datum(spec.datum, spec.datum_params, spec.dim, spec.big_n)) {}

Problem::Problem(const ProblemSpec& spec, BoundaryDatum datum)
    : spec_(spec),
      grid_(spec.dim, spec.res),
      metric_(make_metric(spec.metric, spec.dim, spec.metric_params)),
      datum_(std::move(datum)) {
  spec_.validate();
  if (datum_.n != spec.dim || datum_.big_n != spec.big_n) {
    throw std::invalid_argument("datum dimensions do not match the problem");
  }
  cell_metric_.reserve(grid_.num_cells());
  for (int c = 0; c < grid_.num_cells(); ++c) {
    cell_metric_.push_back(metric_.eval(grid_.cell_center(c)));
  }
  scale_ = std::max(1.0, datum_lipschitz(datum_));
}

// ---------------------------------------------------------------------------------------------
// Energy and residual

namespace {

constexpr int kMaxCorners = 4;

/// Per-cell Du from the nodal vector; writes N x n entries into xi.
struct CellKernel {
  const Problem& problem;
  const Grid& grid;
  int n, big_n, corners;
  std::vector<std::array<int, kMaxCorners>> corner_nodes;
  std::array<std::array<double, kMaxDim>, kMaxCorners> weight{};

  explicit CellKernel(const Problem& pb)
      : problem(pb),
        grid(pb.grid()),
        n(pb.grid().n()),
        big_n(pb.big_n()),
        corners(1 << pb.grid().n()),
        corner_nodes(pb.grid().num_cells()) {
    for (int c = 0; c < grid.num_cells(); ++c) {
      const auto cn = grid.cell_corners(c);
      for (int k = 0; k < corners; ++k) corner_nodes[c][k] = cn[k];
    }
    for (int k = 0; k < corners; ++k)
      for (int a = 0; a < n; ++a) weight[k][a] = grid.corner_weight(k, a);
  }

  GammaVector du(const std::vector<double>& u, int c) const {
    GammaVector xi(n, big_n);
    for (int k = 0; k < corners; ++k) {
      const int node = corner_nodes[c][k];
      for (int i = 0; i < big_n; ++i) {
        const double v = u[node * big_n + i];
        for (int a = 0; a < n; ++a) xi(i, a) += weight[k][a] * v;
      }
    }
    return xi;
  }
};

EnergyParts energy_impl(const CellKernel& ck, const std::vector<double>& u, double eps) {
  const Grid& grid = ck.grid;
  const double p = ck.problem.p();
  std::vector<double> deg(grid.num_cells()), reg(grid.num_cells());
  parallel_for(0, grid.num_cells(), [&](std::int64_t c) {
    const GammaVector xi = ck.du(u, static_cast<int>(c));
    const double t2 = gamma_inner(ck.problem.cell_metric(static_cast<int>(c)), xi, xi);
    const double t = std::sqrt(std::max(0.0, t2));
    deg[c] = integrand_f(t, p);
    reg[c] = 0.5 * eps * t2;
  });
  EnergyParts e;
  for (int c = 0; c < grid.num_cells(); ++c) {
    e.degenerate += deg[c];
    e.regular += reg[c];
  }
  e.degenerate *= grid.cell_volume();
  e.regular *= grid.cell_volume();
  return e;
}

std::vector<double> residual_impl(const CellKernel& ck, const std::vector<double>& u,
                                  double eps) {
  const Grid& grid = ck.grid;
  const int n = ck.n, big_n = ck.big_n;
  const double p = ck.problem.p();
  // per-cell flux gamma A_eps(x, Du), then a fixed-order scatter
  std::vector<GradMatrix> flux(grid.num_cells());
  parallel_for(0, grid.num_cells(), [&](std::int64_t c) {
    const SpatialMatrix& g = ck.problem.cell_metric(static_cast<int>(c));
    const GammaVector xi = ck.du(u, static_cast<int>(c));
    const double t = gamma_norm(g, xi);
    flux[c] = (kernel_h(t, p) + eps) * (xi.mat() * g);
  });
  std::vector<double> r(u.size(), 0.0);
  const double vol = grid.cell_volume();
  for (int c = 0; c < grid.num_cells(); ++c) {
    for (int k = 0; k < ck.corners; ++k) {
      const int node = ck.corner_nodes[c][k];
      for (int i = 0; i < big_n; ++i) {
        double s = 0.0;
        for (int a = 0; a < n; ++a) s += flux[c](i, a) * ck.weight[k][a];
        r[node * big_n + i] += vol * s;
      }
    }
  }
  for (int node = 0; node < grid.num_nodes(); ++node) {
    if (grid.is_boundary(node)) {
      for (int i = 0; i < big_n; ++i) r[node * big_n + i] = 0.0;
    }
  }
  return r;
}

double residual_norm_impl(const Grid& grid, const std::vector<double>& r) {
  double m = 0.0;
  for (double v : r) m = std::max(m, std::abs(v));
  return m / grid.cell_volume();
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

/// Interior unknown numbering: (node, component) -> row, boundary -> -1.
struct InteriorMap {
  std::vector<int> row;
  int size = 0;

  InteriorMap(const Grid& grid, int big_n) : row(static_cast<std::size_t>(grid.num_nodes()) * big_n, -1) {
    for (int node = 0; node < grid.num_nodes(); ++node) {
      if (grid.is_boundary(node)) continue;
      for (int i = 0; i < big_n; ++i) row[node * big_n + i] = size++;
    }
  }
};

using SparseMatrix = Eigen::SparseMatrix<double>;
using Cholesky = Eigen::SimplicialLDLT<SparseMatrix>;

/// Sum over cells of h^n G_c^T M_c G_c for per-cell (nN x nN) matrices M_c.
template <typename CellMatrix>
SparseMatrix assemble(const CellKernel& ck, const InteriorMap& map, CellMatrix&& cell_matrix) {
  const int n = ck.n, big_n = ck.big_n, dim = n * big_n;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(ck.grid.num_cells()) * ck.corners * ck.corners * big_n *
               big_n);
  const double vol = ck.grid.cell_volume();
  for (int c = 0; c < ck.grid.num_cells(); ++c) {
    const Eigen::MatrixXd m = cell_matrix(c);
    // local gradient operator: (i*n + a) row, (corner k, component j) column
    for (int k = 0; k < ck.corners; ++k) {
      for (int j = 0; j < big_n; ++j) {
        const int col = map.row[ck.corner_nodes[c][k] * big_n + j];
        if (col < 0) continue;
        for (int l = 0; l < ck.corners; ++l) {
          for (int i = 0; i < big_n; ++i) {
            const int row = map.row[ck.corner_nodes[c][l] * big_n + i];
            if (row < 0) continue;
            double v = 0.0;
            for (int a = 0; a < n; ++a)
              for (int b = 0; b < n; ++b)
                v += ck.weight[l][a] * m(i * n + a, j * n + b) * ck.weight[k][b];
            if (v != 0.0) trip.emplace_back(row, col, vol * v);
          }
        }
      }
    }
    (void)dim;
  }
  SparseMatrix mat(map.size, map.size);
  mat.setFromTriplets(trip.begin(), trip.end());
  return mat;
}

Eigen::VectorXd gather(const InteriorMap& map, const std::vector<double>& full) {
  Eigen::VectorXd v(map.size);
  for (std::size_t k = 0; k < full.size(); ++k)
    if (map.row[k] >= 0) v[map.row[k]] = full[k];
  return v;
}

std::vector<double> scatter(const InteriorMap& map, const Eigen::VectorXd& v, std::size_t len) {
  std::vector<double> full(len, 0.0);
  for (std::size_t k = 0; k < len; ++k)
    if (map.row[k] >= 0) full[k] = v[map.row[k]];
  return full;
}

struct LineSearchResult {
  bool ok = false;
  double alpha = 0.0;
  std::vector<double> u;
  double energy = 0.0;
  std::vector<double> grad;
};

/// Backtracking from alpha0. Accepts the Armijo condition, or, once the predicted decrease
/// is below floating-point resolution of the energy, a step that keeps the energy within
/// that resolution while reducing the directional derivative.
LineSearchResult backtrack(const CellKernel& ck, const std::vector<double>& u, double e0,
                           const std::vector<double>& d, double slope0, double alpha0,
                           double eps) {
  constexpr double c1 = 1e-4;
  const double resolution = 1e-14 * std::max(std::abs(e0), 1e-300);
  LineSearchResult res;
  double alpha = alpha0;
  std::vector<double> trial(u.size());
  for (int k = 0; k < 60; ++k, alpha *= 0.5) {
    for (std::size_t j = 0; j < u.size(); ++j) trial[j] = u[j] + alpha * d[j];
    const double e = energy_impl(ck, trial, eps).total();
    if (!std::isfinite(e)) continue;
    bool accept = e <= e0 + c1 * alpha * slope0;
    std::vector<double> g;
    if (!accept && e <= e0 + resolution && std::abs(c1 * alpha * slope0) <= resolution) {
      g = residual_impl(ck, trial, eps);
      accept = std::abs(dot(g, d)) < std::abs(slope0);
    }
    if (accept) {
      res.ok = true;
      res.alpha = alpha;
      res.u = trial;
      res.energy = e;
      res.grad = g.empty() ? residual_impl(ck, trial, eps) : std::move(g);
      return res;
    }
  }
  return res;
}

std::vector<double> initial_guess(const Problem& problem, const SolveOptions& opts) {
  const Grid& grid = problem.grid();
  const int big_n = problem.big_n();
  NodalField u(grid, big_n);
  if (opts.warm_start) {
    if (!(opts.warm_start->grid() == grid) || opts.warm_start->big_n() != big_n) {
      throw std::invalid_argument("warm start does not match the problem grid");
    }
    u = *opts.warm_start;
  } else if (opts.init == InitialGuess::datum || opts.init == InitialGuess::random) {
    u = interpolate(grid, big_n, problem.datum().eval);
    if (opts.init == InitialGuess::random) {
      for (int node = 0; node < grid.num_nodes(); ++node) {
        SampleRng rng(opts.seed, static_cast<std::uint64_t>(node));
        for (int i = 0; i < big_n; ++i) u(node, i) += 0.1 * problem.scale() * rng.uniform(-1, 1);
      }
    }
  }
  u = apply_dirichlet(u, problem.datum().eval);
  return u.values();
}

}  // namespace

EnergyParts energy_parts(const Problem& problem, const NodalField& u, double eps) {
  return energy_impl(CellKernel(problem), u.values(), eps);
}

double energy(const Problem& problem, const NodalField& u, double eps) {
  return energy_parts(problem, u, eps).total();
}

NodalField residual(const Problem& problem, const NodalField& u, double eps) {
  NodalField r(problem.grid(), problem.big_n());
  r.values() = residual_impl(CellKernel(problem), u.values(), eps);
  return r;
}

double residual_norm(const Problem& problem, const NodalField& r) {
  return residual_norm_impl(problem.grid(), r.values());
}

double max_gamma_grad(const Problem& problem, const NodalField& u) {
  double m = 0.0;
  for (int c = 0; c < problem.grid().num_cells(); ++c) {
    m = std::max(m, gamma_norm(problem.cell_metric(c), cell_gradient(u, c)));
  }
  return m;
}

SolutionState solve_regularized(const Problem& problem, double eps, const SolveOptions& opts) {
  if (!(eps > 0.0 && eps <= 1.0)) {
    throw std::invalid_argument("solve_regularized: eps must lie in (0,1]");
  }
  if (opts.method == SolveMethod::newton && problem.p() < 2.0) {
    throw std::invalid_argument("newton path requires p >= 2");
  }
  const Grid& grid = problem.grid();
  const CellKernel ck(problem);
  const InteriorMap map(grid, problem.big_n());
  const double tol = opts.tol > 0.0 ? opts.tol : 1e-8 * problem.scale();
  const KernelParams kp{problem.p(), eps, 0.0};

  std::vector<double> u = initial_guess(problem, opts);
  double e = energy_impl(ck, u, eps).total();
  std::vector<double> g = residual_impl(ck, u, eps);

  SolutionState st{NodalField(grid, problem.big_n()), 0.0, 0.0, 0.0, 0, false, 0.0, {}};
  st.eps = eps;
  st.energy_trace.push_back(e);

  // gamma-weighted Laplacian; preconditioner for the first-order path
  Cholesky precond;
  if (opts.method == SolveMethod::ncg && map.size > 0) {
    precond.compute(assemble(ck, map, [&](int c) {
      const GammaVector zero(ck.n, ck.big_n);
      return form_b_matrix(problem.cell_metric(c), zero, KernelParams{problem.p(), 1.0, 0.0});
    }));
  }
  auto apply_precond = [&](const std::vector<double>& r) {
    if (map.size == 0) return r;
    return scatter(map, precond.solve(gather(map, r)), r.size());
  };

  std::vector<double> z = opts.method == SolveMethod::ncg ? apply_precond(g) : g;
  std::vector<double> d(u.size());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = -z[k];
  double alpha_prev = 1.0;
  int since_restart = 0;
  int it = 0;
  double rn = residual_norm_impl(grid, g);
  for (; it < opts.max_iter && rn > tol; ++it) {
    double alpha0 = 1.0;
    if (opts.method == SolveMethod::newton) {
      Cholesky hess(assemble(ck, map, [&](int c) {
        return form_b_matrix(problem.cell_metric(c), ck.du(u, c), kp);
      }));
      if (hess.info() == Eigen::Success) {
        const std::vector<double> step = scatter(map, hess.solve(gather(map, g)), g.size());
        for (std::size_t k = 0; k < d.size(); ++k) d[k] = -step[k];
      } else {
        d = g;
        for (double& v : d) v = -v;
      }
    }
    double slope = dot(g, d);
    if (!(slope < 0.0)) {
      z = opts.method == SolveMethod::ncg ? apply_precond(g) : g;
      for (std::size_t k = 0; k < d.size(); ++k) d[k] = -z[k];
      slope = dot(g, d);
      since_restart = 0;
      if (!(slope < 0.0)) break;
    }
    if (opts.method == SolveMethod::ncg) {
      // secant estimate of the minimiser along d from the directional derivative at alpha_prev
      std::vector<double> probe(u.size());
      for (std::size_t k = 0; k < u.size(); ++k) probe[k] = u[k] + alpha_prev * d[k];
      const double slope_t = dot(residual_impl(ck, probe, eps), d);
      alpha0 = slope_t > slope ? alpha_prev * (-slope) / (slope_t - slope) : 4.0 * alpha_prev;
      alpha0 = std::clamp(alpha0, 1e-3 * alpha_prev, 1e3 * alpha_prev);
    }
    LineSearchResult ls = backtrack(ck, u, e, d, slope, alpha0, eps);
    if (!ls.ok && opts.method == SolveMethod::ncg && since_restart > 0) {
      // retry along the preconditioned steepest-descent direction
      for (std::size_t k = 0; k < d.size(); ++k) d[k] = -z[k];
      since_restart = 0;
      ls = backtrack(ck, u, e, d, dot(g, d), alpha_prev, eps);
    }
    if (!ls.ok) break;
    alpha_prev = ls.alpha;
    u = std::move(ls.u);
    e = ls.energy;
    st.energy_trace.push_back(e);
    std::vector<double> g_new = std::move(ls.grad);
    rn = residual_norm_impl(grid, g_new);
    if (opts.method == SolveMethod::ncg) {
      std::vector<double> z_new = apply_precond(g_new);
      const double denom = dot(g, z);
      double beta = 0.0;
      if (denom > 0.0) {
        double num = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) num += g_new[k] * (z_new[k] - z[k]);
        beta = std::max(0.0, num / denom);
      }
      if (++since_restart >= 50) {
        beta = 0.0;
        since_restart = 0;
      }
      for (std::size_t k = 0; k < d.size(); ++k) d[k] = -z_new[k] + beta * d[k];
      z = std::move(z_new);
    }
    g = std::move(g_new);
  }

  st.u.values() = std::move(u);
  st.energy = e;
  st.residual_norm = rn;
  st.iterations = it;
  st.converged = rn <= tol;
  st.max_grad_norm = max_gamma_grad(problem, st.u);
  return st;
}

std::vector<SolutionState> eps_continuation(const Problem& problem, const SolveOptions& opts) {
  std::vector<SolutionState> out;
  SolveOptions o = opts;
  for (double eps : problem.spec().eps_schedule) {
    SolutionState st = solve_regularized(problem, eps, o);
    if (!st.converged) {
      std::ostringstream msg;
      msg << "solve did not converge at eps=" << fmt_double(eps) << " (residual "
          << fmt_double(st.residual_norm) << " after " << st.iterations << " iterations)";
      throw SolveError(msg.str(), eps);
    }
    o.warm_start = st.u;
    out.push_back(std::move(st));
  }
  return out;
}

OracleSlope solve_1d_oracle(double p, double eps, double a) {
  if (!(eps >= 0.0)) throw std::invalid_argument("eps must be nonnegative");
  if (eps == 0.0 && std::abs(a) <= 1.0) return {a, false};
  // flux q = h_eps(|s|) s is constant along the interval; invert the strictly increasing map
  auto flux = [&](double s) { return (kernel_h(std::abs(s), p) + eps) * s; };
  const double q = flux(a);
  double lo = -std::abs(a) - 1.0, hi = std::abs(a) + 1.0;
  for (int k = 0; k < 200 && hi - lo > 0.0; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (flux(mid) < q ? lo : hi) = mid;
  }
  const double s = std::abs(flux(lo) - q) <= std::abs(flux(hi) - q) ? lo : hi;
  return {s, true};
}

void write_checkpoint(std::ostream& os, const ProblemSpec& spec, const SolutionState& state) {
  os << "# degen-checkpoint v1\n";
  os << "# spec_hash=" << spec.hash() << '\n';
  os << "# eps=" << fmt_double(state.eps) << '\n';
  os << "# iterations=" << state.iterations << '\n';
  os << "# energy=" << fmt_double(state.energy) << '\n';
  os << "# residual=" << fmt_double(state.residual_norm) << '\n';
  write_nodal_csv(os, state.u);
}

SolutionState read_checkpoint(std::istream& is, const Problem& problem) {
  std::map<std::string, std::string> header;
  std::string line;
  const Grid& grid = problem.grid();
  SolutionState st{NodalField(grid, problem.big_n()), 0.0, 0.0, 0.0, 0, false, 0.0, {}};
  bool columns_seen = false;
  int rows = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string tok;
      while (ls >> tok) {
        const auto eq = tok.find('=');
        if (eq != std::string::npos) header[tok.substr(0, eq)] = tok.substr(eq + 1);
      }
      continue;
    }
    if (!columns_seen) {
      columns_seen = true;
      continue;
    }
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ls, cell, ',')) vals.push_back(std::stod(cell));
    if (static_cast<int>(vals.size()) != 1 + grid.n() + problem.big_n()) {
      throw std::runtime_error("checkpoint: malformed row");
    }
    const int node = static_cast<int>(vals[0]);
    if (node < 0 || node >= grid.num_nodes()) throw std::runtime_error("checkpoint: bad node");
    for (int i = 0; i < problem.big_n(); ++i) st.u(node, i) = vals[1 + grid.n() + i];
    ++rows;
  }
  auto get = [&](const char* key) {
    const auto it = header.find(key);
    if (it == header.end()) throw std::runtime_error(std::string("checkpoint: missing ") + key);
    return it->second;
  };
  if (std::stoi(get("n")) != grid.n() || std::stoi(get("res")) != grid.res() ||
      std::stoi(get("big_n")) != problem.big_n() || rows != grid.num_nodes()) {
    throw std::runtime_error("checkpoint: grid does not match the problem");
  }
  st.eps = std::stod(get("eps"));
  st.iterations = std::stoi(get("iterations"));
  st.energy = std::stod(get("energy"));
  st.residual_norm = std::stod(get("residual"));
  st.converged = true;
  st.max_grad_norm = max_gamma_grad(problem, st.u);
  return st;
}

}  // namespace degen
