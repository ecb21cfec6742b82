#include "doctest.h"

#include "degen/grid.hpp"
#include "degen/random.hpp"

#include <cmath>
#include <sstream>

using namespace degen;

namespace {

std::vector<double> scalar(double v) { return {v}; }

}  // namespace

TEST_CASE("grid geometry") {
  const Grid g(2, 5);
  CHECK(g.h() * (g.res() - 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g.num_nodes() == 25);
  CHECK(g.num_cells() == 16);
  CHECK(g.is_boundary(0));
  CHECK_FALSE(g.is_boundary(6));
  CHECK_THROWS_AS(Grid(2, 2), std::invalid_argument);
  CHECK_THROWS_AS(Grid(3, 5), std::invalid_argument);
}

TEST_CASE("gradient is exact on multilinear fields") {
  for (int n : {1, 2}) {
    const Grid g(n, 7);
    const NodalField u = interpolate(g, 2, [n](const Point& x) {
      return std::vector<double>{2 * x[0] + 0.5, n == 2 ? 3 * x[0] * x[1] - x[1] : -x[0]};
    });
    for (int c = 0; c < g.num_cells(); ++c) {
      const Point x = g.cell_center(c);
      const GammaVector xi = cell_gradient(u, c);
      CHECK(std::abs(xi(0, 0) - 2) <= 1e-13);
      if (n == 2) {
        CHECK(std::abs(xi(1, 0) - 3 * x[1]) <= 1e-13);
        CHECK(std::abs(xi(1, 1) - (3 * x[0] - 1)) <= 1e-13);
      } else {
        CHECK(std::abs(xi(1, 0) + 1) <= 1e-13);
      }
    }
  }
}

TEST_CASE("bilinear field on the coarsest grid") {
  const Grid g(2, 3);
  const NodalField u = interpolate(g, 1, [](const Point& x) { return scalar(x[0] * x[1]); });
  for (int c = 0; c < g.num_cells(); ++c) {
    const Point x = g.cell_center(c);
    CHECK(cell_gradient(u, c)(0, 0) == doctest::Approx(x[1]));
    CHECK(cell_gradient(u, c)(0, 1) == doctest::Approx(x[0]));
  }
}

TEST_CASE("divergence is the negative adjoint of the gradient") {
  for (int n : {1, 2}) {
    const Grid g(n, 6);
    double worst = 0.0;
    for (std::uint64_t k = 0; k < 100; ++k) {
      SampleRng rng(41, k);
      CellGradField flux(g, 2);
      for (int c = 0; c < g.num_cells(); ++c)
        for (int i = 0; i < 2; ++i)
          for (int a = 0; a < n; ++a) flux.entry(c, i, a) = rng.normal();
      NodalField phi(g, 2);
      for (int node = 0; node < g.num_nodes(); ++node)
        for (int i = 0; i < 2; ++i) phi(node, i) = g.is_boundary(node) ? 0.0 : rng.normal();
      const CellGradField dphi = gradient(phi);
      double lhs = 0.0;
      for (int c = 0; c < g.num_cells(); ++c)
        for (int i = 0; i < 2; ++i)
          for (int a = 0; a < n; ++a) lhs += flux.entry(c, i, a) * dphi.entry(c, i, a);
      const NodalField div = divergence(flux);
      double rhs = 0.0;
      for (std::size_t j = 0; j < phi.values().size(); ++j) rhs += div.values()[j] * phi.values()[j];
      worst = std::max(worst, std::abs(lhs * g.cell_volume() + rhs * g.cell_volume()));
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("divergence of simple fluxes") {
  const Grid g(2, 9);
  CellGradField constant(g, 1), ramp(g, 1);
  for (int c = 0; c < g.num_cells(); ++c) {
    constant.entry(c, 0, 0) = 1.3;
    constant.entry(c, 0, 1) = -0.4;
    ramp.entry(c, 0, 0) = g.cell_center(c)[0];
  }
  const NodalField d0 = divergence(constant), d1 = divergence(ramp);
  for (int node = 0; node < g.num_nodes(); ++node) {
    if (g.is_boundary(node)) continue;
    CHECK(std::abs(d0(node, 0)) <= 1e-12);
    CHECK(d1(node, 0) == doctest::Approx(1.0));
  }
}

TEST_CASE("Dirichlet data and interpolation") {
  const Grid g(2, 5);
  NodalField u(g, 1);
  u(12, 0) = 7.0;
  const NodalField v = apply_dirichlet(u, [](const Point& x) { return scalar(2 * x[0]); });
  CHECK(v(12, 0) == 7.0);
  for (int node = 0; node < g.num_nodes(); ++node) {
    if (!g.is_boundary(node)) continue;
    CHECK(v(node, 0) == 2 * g.node_coord(node)[0]);
  }
  CHECK_THROWS_AS(apply_dirichlet(u, [](const Point&) { return std::vector<double>{1, 2}; }),
                  std::invalid_argument);
}

TEST_CASE("midpoint quadrature") {
  const Grid g(2, 11);
  std::vector<double> one(g.num_cells(), 1.0), lin(g.num_cells()), half(g.num_cells());
  for (int c = 0; c < g.num_cells(); ++c) {
    lin[c] = g.cell_center(c)[0];
    half[c] = g.cell_center(c)[0] < 0.5 ? 1.0 : 0.0;
  }
  CHECK(integrate(g, one) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(integrate(g, lin) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::abs(integrate(g, half) - 0.5) <= g.h());
}

TEST_CASE("balls select cell centres") {
  const Grid g(2, 11);
  Point x0(2);
  x0 << 0.5, 0.5;
  const auto cells = g.cells_in_ball(x0, 0.2);
  CHECK(!cells.empty());
  for (int c : cells) CHECK((g.cell_center(c) - x0).norm() <= 0.2);
}

TEST_CASE("nodal CSV layout") {
  const Grid g(1, 3);
  const NodalField u = interpolate(g, 1, [](const Point& x) { return scalar(x[0]); });
  std::ostringstream os;
  write_nodal_csv(os, u);
  CHECK(os.str() == "# n=1 res=3 big_n=1\nnode,x1,u1\n0,0,0\n1,0.5,0.5\n2,1,1\n");
}
