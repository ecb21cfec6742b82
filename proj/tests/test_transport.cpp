#include "doctest.h"

#include "degen/random.hpp"
#include "degen/transport.hpp"

#include <cmath>

using namespace degen;

namespace {

Problem problem(std::vector<double> slope, const std::string& metric = "identity",
                std::vector<double> mp = {}, int big_n = 1) {
  ProblemSpec s;
  s.res = 9;
  s.big_n = big_n;
  s.datum_params = std::move(slope);
  s.metric = metric;
  s.metric_params = std::move(mp);
  return Problem(s);
}

}  // namespace

TEST_CASE("flow of the linear solution") {
  const Problem pb = problem({2.0, 0.0});
  const NodalField u = interpolate(pb.grid(), 1, pb.datum().eval);
  const FlowField f = traffic_flow(pb, u);
  for (int c = 0; c < pb.grid().num_cells(); ++c) {
    CHECK(f.sigma[c][0] == doctest::Approx(1.0));
    CHECK(f.congestion_cost[c] == doctest::Approx(1.5));
    CHECK(std::abs(f.fy_residual[c]) <= 1e-12);
  }
  const DualityReport r = duality_report(f);
  CHECK(r.primal_energy == doctest::Approx(0.5));
  CHECK(r.dual_energy == doctest::Approx(1.5));
  CHECK(r.pairing == doctest::Approx(2.0));
  CHECK(r.div_norm <= 1e-8);
}

TEST_CASE("no flow below the congestion threshold") {
  const Problem pb = problem({0.5, 0.5});
  const DualityReport r = duality_report(traffic_flow(pb, interpolate(pb.grid(), 1, pb.datum().eval)));
  CHECK(r.primal_energy == 0.0);
  CHECK(r.dual_energy == 0.0);
  CHECK(r.pairing == 0.0);
  CHECK(r.div_norm == 0.0);
  CHECK(r.max_fy_residual == 0.0);
}

TEST_CASE("Fenchel-Young inequality on arbitrary pairs") {
  for (std::uint64_t k = 0; k < 5000; ++k) {
    SampleRng rng(13, k);
    Point xi(2), s(2);
    xi << rng.normal() * 2, rng.normal() * 2;
    s << rng.normal() * 2, rng.normal() * 2;
    CHECK(fenchel_young_defect(xi, s, rng.uniform(1.2, 4)) >= -1e-12);
  }
}

TEST_CASE("random fields give nonnegative defects") {
  const Problem pb = problem({1.5, 1.0});
  NodalField u = interpolate(pb.grid(), 1, pb.datum().eval);
  for (int k = 0; k < pb.grid().num_nodes(); ++k) u(k, 0) += SampleRng(3, k).uniform(-0.2, 0.2);
  const DualityReport r = duality_report(traffic_flow(pb, u));
  CHECK(r.min_fy_residual >= -1e-12);
  CHECK(r.max_fy_residual <= 1e-10);
}

TEST_CASE("preconditions") {
  const Problem rot = problem({2.0, 0.0}, "diagonal", {2.0, 1.0});
  CHECK_THROWS_AS(traffic_flow(rot, interpolate(rot.grid(), 1, rot.datum().eval)),
                  std::invalid_argument);
  const Problem vec = problem({2.0, 0.0, 0.0, 1.0}, "identity", {}, 2);
  CHECK_THROWS_AS(traffic_flow(vec, interpolate(vec.grid(), 2, vec.datum().eval)),
                  std::invalid_argument);
}
