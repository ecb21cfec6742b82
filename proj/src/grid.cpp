#include "degen/grid.hpp"

#include "degen/csv.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace degen {

Grid::Grid(int n, int res) : n_(n), res_(res) {
  if (n < 1 || n > 2) throw std::invalid_argument("grid: dimension must be 1 or 2");
  if (res < 3) throw std::invalid_argument("grid: need at least 3 nodes per axis");
  h_ = 1.0 / (res - 1);
  num_nodes_ = n == 1 ? res : res * res;
  num_cells_ = n == 1 ? res - 1 : (res - 1) * (res - 1);
  cell_volume_ = std::pow(h_, n);
}

Point Grid::node_coord(int node) const {
  Point x(n_);
  x[0] = (node % res_) * h_;
  if (n_ == 2) x[1] = (node / res_) * h_;
  return x;
}

Point Grid::cell_center(int cell) const {
  const int m = res_ - 1;
  Point x(n_);
  x[0] = ((cell % m) + 0.5) * h_;
  if (n_ == 2) x[1] = ((cell / m) + 0.5) * h_;
  return x;
}

bool Grid::is_boundary(int node) const {
  const int i0 = node % res_;
  if (i0 == 0 || i0 == res_ - 1) return true;
  if (n_ == 2) {
    const int i1 = node / res_;
    if (i1 == 0 || i1 == res_ - 1) return true;
  }
  return false;
}

std::vector<int> Grid::cell_corners(int cell) const {
  const int m = res_ - 1;
  if (n_ == 1) return {cell, cell + 1};
  const int j0 = cell % m, j1 = cell / m;
  const int base = j0 + res_ * j1;
  return {base, base + 1, base + res_, base + res_ + 1};
}

double Grid::corner_weight(int corner_bits, int alpha) const {
  const double sign = (corner_bits >> alpha) & 1 ? 1.0 : -1.0;
  return n_ == 1 ? sign / h_ : sign / (2.0 * h_);
}

std::vector<int> Grid::cells_in_ball(const Point& x0, double rho) const {
  std::vector<int> out;
  for (int c = 0; c < num_cells_; ++c) {
    if ((cell_center(c) - x0).norm() <= rho) out.push_back(c);
  }
  return out;
}

NodalField::NodalField(Grid grid, int big_n)
    : grid_(grid), big_n_(big_n), values_(static_cast<std::size_t>(grid.num_nodes()) * big_n) {
  if (big_n < 1 || big_n > kMaxCodim) throw std::invalid_argument("field: bad codomain dim");
}

CellGradField::CellGradField(Grid grid, int big_n)
    : grid_(grid),
      big_n_(big_n),
      values_(static_cast<std::size_t>(grid.num_cells()) * big_n * grid.n()) {}

GammaVector CellGradField::at(int cell) const {
  GammaVector v(grid_.n(), big_n_);
  for (int i = 0; i < big_n_; ++i)
    for (int a = 0; a < grid_.n(); ++a) v(i, a) = entry(cell, i, a);
  return v;
}

void CellGradField::set(int cell, const GammaVector& v) {
  if (v.n() != grid_.n() || v.big_n() != big_n_) throw std::invalid_argument("dimension mismatch");
  for (int i = 0; i < big_n_; ++i)
    for (int a = 0; a < grid_.n(); ++a) entry(cell, i, a) = v(i, a);
}

GammaVector cell_gradient(const NodalField& u, int cell) {
  const Grid& grid = u.grid();
  const int n = grid.n();
  GammaVector xi(n, u.big_n());
  const auto corners = grid.cell_corners(cell);
  for (int k = 0; k < static_cast<int>(corners.size()); ++k) {
    for (int a = 0; a < n; ++a) {
      const double w = grid.corner_weight(k, a);
      for (int i = 0; i < u.big_n(); ++i) xi(i, a) += w * u(corners[k], i);
    }
  }
  return xi;
}

CellGradField gradient(const NodalField& u) {
  CellGradField out(u.grid(), u.big_n());
  for (int c = 0; c < u.grid().num_cells(); ++c) out.set(c, cell_gradient(u, c));
  return out;
}

NodalField divergence(const CellGradField& flux) {
  const Grid& grid = flux.grid();
  NodalField out(grid, flux.big_n());
  for (int c = 0; c < grid.num_cells(); ++c) {
    const auto corners = grid.cell_corners(c);
    for (int k = 0; k < static_cast<int>(corners.size()); ++k) {
      for (int i = 0; i < flux.big_n(); ++i) {
        double s = 0.0;
        for (int a = 0; a < grid.n(); ++a) s += flux.entry(c, i, a) * grid.corner_weight(k, a);
        out(corners[k], i) -= s;
      }
    }
  }
  return out;
}

NodalField apply_dirichlet(const NodalField& u, const Datum& datum) {
  NodalField out = u;
  const Grid& grid = u.grid();
  for (int k = 0; k < grid.num_nodes(); ++k) {
    if (!grid.is_boundary(k)) continue;
    const auto v = datum(grid.node_coord(k));
    if (static_cast<int>(v.size()) != u.big_n()) throw std::invalid_argument("datum dimension");
    for (int i = 0; i < u.big_n(); ++i) out(k, i) = v[i];
  }
  return out;
}

NodalField interpolate(const Grid& grid, int big_n, const Datum& datum) {
  NodalField out(grid, big_n);
  for (int k = 0; k < grid.num_nodes(); ++k) {
    const auto v = datum(grid.node_coord(k));
    if (static_cast<int>(v.size()) != big_n) throw std::invalid_argument("datum dimension");
    for (int i = 0; i < big_n; ++i) out(k, i) = v[i];
  }
  return out;
}

double integrate(const Grid& grid, std::span<const double> cell_values) {
  if (static_cast<int>(cell_values.size()) != grid.num_cells()) {
    throw std::invalid_argument("integrate: one value per cell expected");
  }
  double s = 0.0;
  for (double v : cell_values) s += v;
  return s * grid.cell_volume();
}

void write_nodal_csv(std::ostream& os, const NodalField& u) {
  const Grid& grid = u.grid();
  os << "# n=" << grid.n() << " res=" << grid.res() << " big_n=" << u.big_n() << '\n';
  os << "node";
  for (int a = 0; a < grid.n(); ++a) os << ",x" << a + 1;
  for (int i = 0; i < u.big_n(); ++i) os << ",u" << i + 1;
  os << '\n';
  for (int k = 0; k < grid.num_nodes(); ++k) {
    os << k;
    const Point x = grid.node_coord(k);
    for (int a = 0; a < grid.n(); ++a) os << ',' << fmt_double(x[a]);
    for (int i = 0; i < u.big_n(); ++i) os << ',' << fmt_double(u(k, i));
    os << '\n';
  }
}

void write_cell_csv(std::ostream& os, const Grid& grid, int big_n,
                    const std::vector<std::vector<double>>& columns,
                    const std::vector<std::string>& names) {
  if (columns.size() != names.size()) throw std::invalid_argument("column/name count mismatch");
  os << "# n=" << grid.n() << " res=" << grid.res() << " big_n=" << big_n << '\n';
  os << "cell";
  for (int a = 0; a < grid.n(); ++a) os << ",x" << a + 1;
  for (const auto& name : names) os << ',' << name;
  os << '\n';
  for (int c = 0; c < grid.num_cells(); ++c) {
    os << c;
    const Point x = grid.cell_center(c);
    for (int a = 0; a < grid.n(); ++a) os << ',' << fmt_double(x[a]);
    for (const auto& col : columns) os << ',' << fmt_double(col.at(c));
    os << '\n';
  }
}

}  // namespace degen
