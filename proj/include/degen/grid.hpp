#pragma once

#include "degen/metric.hpp"

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace degen {

/// Uniform tensor-product grid on [0,1]^n with `res` nodes per axis.
class Grid {
 public:
  Grid(int n, int res);

  int n() const { return n_; }
  int res() const { return res_; }
  double h() const { return h_; }
  int num_nodes() const { return num_nodes_; }
  int num_cells() const { return num_cells_; }
  /// h^n, the weight of one cell in the midpoint rule.
  double cell_volume() const { return cell_volume_; }

  Point node_coord(int node) const;
  Point cell_center(int cell) const;
  bool is_boundary(int node) const;

  /// The 2^n corner nodes of a cell, ordered by bit pattern (bit a set = upper side on axis a).
  std::vector<int> cell_corners(int cell) const;
  /// d(grad_c)_alpha / d(u at corner) for the cell-centre gradient of the multilinear interpolant.
  double corner_weight(int corner_bits, int alpha) const;

  /// Cells whose centres lie within Euclidean distance rho of x0.
  std::vector<int> cells_in_ball(const Point& x0, double rho) const;

  bool operator==(const Grid& o) const { return n_ == o.n_ && res_ == o.res_; }

 private:
  int n_, res_;
  double h_;
  int num_nodes_, num_cells_;
  double cell_volume_;
};

/// Vector field with N components per node; values laid out as node * N + i.
class NodalField {
 public:
  NodalField(Grid grid, int big_n);

  const Grid& grid() const { return grid_; }
  int big_n() const { return big_n_; }
  double& operator()(int node, int i) { return values_[node * big_n_ + i]; }
  double operator()(int node, int i) const { return values_[node * big_n_ + i]; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

 private:
  Grid grid_;
  int big_n_;
  std::vector<double> values_;
};

/// One GammaVector (N x n) per cell centre, stored flat.
class CellGradField {
 public:
  CellGradField(Grid grid, int big_n);

  const Grid& grid() const { return grid_; }
  int big_n() const { return big_n_; }
  GammaVector at(int cell) const;
  void set(int cell, const GammaVector& v);
  double& entry(int cell, int i, int alpha) {
    return values_[(cell * big_n_ + i) * grid_.n() + alpha];
  }
  double entry(int cell, int i, int alpha) const {
    return values_[(cell * big_n_ + i) * grid_.n() + alpha];
  }

 private:
  Grid grid_;
  int big_n_;
  std::vector<double> values_;
};

using Datum = std::function<std::vector<double>(const Point&)>;

/// Cell-centre gradient of the multilinear interpolant.
CellGradField gradient(const NodalField& u);
GammaVector cell_gradient(const NodalField& u, int cell);

/// Negative adjoint of `gradient` under the midpoint / nodal quadrature pairings.
NodalField divergence(const CellGradField& flux);

/// Copy of u with boundary nodes overwritten by the datum.
NodalField apply_dirichlet(const NodalField& u, const Datum& datum);
/// Nodal interpolation of the datum over the whole grid.
NodalField interpolate(const Grid& grid, int big_n, const Datum& datum);

/// Midpoint rule: sum of values times h^n.
double integrate(const Grid& grid, std::span<const double> cell_values);

void write_nodal_csv(std::ostream& os, const NodalField& u);
void write_cell_csv(std::ostream& os, const Grid& grid, int big_n,
                    const std::vector<std::vector<double>>& columns,
                    const std::vector<std::string>& names);

}  // namespace degen
