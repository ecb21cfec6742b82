#pragma once

#include "degen/grid.hpp"
#include "degen/kernel.hpp"
#include "degen/metric.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace degen {

/// Boundary datum from the built-in library:
///   zero                      u = 0
///   linear    a_{1,1..n}, .., a_{N,1..n}   u^i = sum_alpha a_{i,alpha} x_alpha
///   bilinear  c               u^i = c x1 x2             (n = 2)
///   quadratic a b             u^i = a x1^2 + b x_n
struct BoundaryDatum {
  std::string id;
  std::vector<double> params;
  int n = 1;
  int big_n = 1;
  Datum eval;
};

BoundaryDatum make_datum(const std::string& id, const std::vector<double>& params, int n,
                         int big_n);
/// Datum that reproduces a stored nodal field at the grid nodes.
BoundaryDatum datum_from_field(const NodalField& u);
/// Largest Euclidean gradient norm of the datum's interpolant on a 65-per-axis sample grid.
double datum_lipschitz(const BoundaryDatum& datum);

struct ProblemSpec {
  int dim = 2;
  int res = 33;
  std::string metric = "identity";
  std::vector<double> metric_params;
  double p = 2.0;
  int big_n = 1;
  std::string datum = "linear";
  std::vector<double> datum_params{2.0, 0.0};
  std::vector<double> eps_schedule{1e-1, 1e-2, 1e-3};

  /// Throws std::invalid_argument naming the broken constraint.
  void validate() const;
  /// Digest of the canonical textual form; identifies checkpoints.
  std::string hash() const;
};

/// A ProblemSpec with its grid, metric and datum built, and gamma cached at cell centres.
class Problem {
 public:
  explicit Problem(const ProblemSpec& spec);
  Problem(const ProblemSpec& spec, BoundaryDatum datum);

  const ProblemSpec& spec() const { return spec_; }
  const Grid& grid() const { return grid_; }
  const MetricField& metric() const { return metric_; }
  const BoundaryDatum& datum() const { return datum_; }
  double p() const { return spec_.p; }
  int big_n() const { return spec_.big_n; }
  const SpatialMatrix& cell_metric(int cell) const { return cell_metric_[cell]; }
  /// max(1, Lipschitz constant of the datum).
  double scale() const { return scale_; }

 private:
  ProblemSpec spec_;
  Grid grid_;
  MetricField metric_;
  BoundaryDatum datum_;
  std::vector<SpatialMatrix> cell_metric_;
  double scale_ = 1.0;
};

struct EnergyParts {
  double degenerate = 0.0;  ///< sum of F(|Du|_gamma) h^n
  double regular = 0.0;     ///< sum of (eps/2) |Du|^2_gamma h^n
  double total() const { return degenerate + regular; }
};

EnergyParts energy_parts(const Problem& problem, const NodalField& u, double eps);
double energy(const Problem& problem, const NodalField& u, double eps);

/// Exact gradient of the discrete energy with respect to interior nodal values (zero on the
/// boundary): sum over cells of h^n <A_eps(x, Du), D phi_k>_gamma.
NodalField residual(const Problem& problem, const NodalField& u, double eps);
/// Max over interior nodes of |residual| / h^n (strong-form residual).
double residual_norm(const Problem& problem, const NodalField& residual);

enum class SolveMethod { ncg, newton };
enum class InitialGuess { datum, zero, random };

struct SolveOptions {
  double tol = 0.0;  ///< 0 selects 1e-8 * problem.scale()
  int max_iter = 20000;
  std::uint64_t seed = 0;
  SolveMethod method = SolveMethod::ncg;
  InitialGuess init = InitialGuess::datum;
  std::optional<NodalField> warm_start;
};

struct SolutionState {
  NodalField u;
  double eps = 0.0;
  double energy = 0.0;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  double max_grad_norm = 0.0;        ///< max over cells of |Du|_gamma
  std::vector<double> energy_trace;  ///< energy after every accepted step (entry 0: start)
};

class SolveError : public std::runtime_error {
 public:
  SolveError(const std::string& what, double eps) : std::runtime_error(what), eps_(eps) {}
  double eps() const { return eps_; }

 private:
  double eps_;
};

/// Minimises the regularised energy for eps > 0. Non-convergence is reported through
/// `converged`, not thrown; eps <= 0 throws std::invalid_argument.
SolutionState solve_regularized(const Problem& problem, double eps, const SolveOptions& opts);

/// One warm-started solve per schedule entry; throws SolveError naming the failing eps.
std::vector<SolutionState> eps_continuation(const Problem& problem, const SolveOptions& opts);

struct OracleSlope {
  double slope = 0.0;
  bool unique = true;
};

/// 1D closed form: constant flux and strict monotonicity of t -> h_eps(t) t pin the slope.
OracleSlope solve_1d_oracle(double p, double eps, double a);

double max_gamma_grad(const Problem& problem, const NodalField& u);

void write_checkpoint(std::ostream& os, const ProblemSpec& spec, const SolutionState& state);
/// Reads a checkpoint written for the same grid; throws std::runtime_error on mismatch.
SolutionState read_checkpoint(std::istream& is, const Problem& problem);

}  // namespace degen
