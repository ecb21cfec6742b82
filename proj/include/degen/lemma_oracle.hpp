#pragma once

#include "degen/metric.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace degen {

enum class LemmaId {
  L2_1,
  L2_2,
  L2_3a,
  L2_3b,
  L2_4,
  L2_5a,
  L2_5b,
  L2_6a,
  L2_6b,
  L2_7,
  L2_8_1,
  L2_8_2,
  L2_8_3,
  L2_Bfreeze,
  L2_9,
  L2_10,
  L2_11,
};

enum class LemmaMode { exact, ratio };

const std::vector<LemmaId>& all_lemmas();
std::string lemma_name(LemmaId id);
/// Throws std::invalid_argument for an unknown name.
LemmaId parse_lemma(const std::string& name);
LemmaMode lemma_mode(LemmaId id);
const char* mode_name(LemmaMode mode);

struct LemmaCase {
  LemmaId id = LemmaId::L2_1;
  /// Exponents drawn uniformly per sample.
  std::vector<double> p_values{1.5, 2.0, 3.0};
  /// Restrict gamma to the identity.
  bool identity_metric = false;
  /// Fix delta for the lemmas that carry one (L2_3a, L2_3b, L2_9).
  std::optional<double> delta;
};

struct LemmaReport {
  std::string id;
  LemmaMode mode = LemmaMode::exact;
  std::int64_t samples = 0;
  std::int64_t violations = 0;
  double c_emp = 0.0;       ///< max observed lhs / rhs
  double c_emp_half = 0.0;  ///< same over the first half of the samples (ratio mode)
  bool stable = true;       ///< c_emp / c_emp_half - 1 < 0.05 (ratio mode)
  std::string worst_case;   ///< sample attaining c_emp, as key=value pairs
  bool passed() const;
};

/// Exact mode draws `budget` samples and counts violations of lhs <= rhs at relative
/// tolerance 1e-10. Ratio mode draws 2 * budget samples, each locally maximised by a short
/// hill-climb, then refines the best few of each half with a longer climb; c_emp_half comes
/// from the first half only. Results depend only on (case, budget, seed), not on threads.
LemmaReport run_lemma(const LemmaCase& c, std::int64_t budget, std::uint64_t seed);

/// c_emp at each budget (sample sets are nested, so the curve is non-decreasing).
/// Throws std::invalid_argument for an exact-mode lemma.
std::vector<double> estimate_constant(const LemmaCase& c, const std::vector<std::int64_t>& budgets,
                                      std::uint64_t seed);

/// Gradient and per-component Hessians of a smooth field v : R^n -> R^N at a point.
struct FieldJet {
  GammaVector dv;
  std::array<SpatialMatrix, kMaxCodim> hess;
};
using SmoothField = std::function<FieldJet(const Point&)>;

struct L211Params {
  double p = 2.0;
  double eps = 0.0;
  double fd_step = 1e-3;
  double margin = 0.05;  ///< required distance of |Dv|_gamma from 1
};

/// Pointwise ratio |D[g(|Dv|_gamma) Dv]|^2 / (A_eps(x,Dv)(D^2v,D^2v)(|Dv|_gamma-1)_+^p +
/// g'(|Dv|_gamma)^2 |Dv|^4_gamma), the left side by fourth-order central differences.
/// Points with |Dv|_gamma < 1 contribute 0/0 and are skipped. `stable` compares the maxima
/// at fd_step and fd_step / 2. Throws std::invalid_argument if |Dv|_gamma comes within
/// `margin` of 1, or a stencil leaves the unit cube.
LemmaReport check_l2_11(const SmoothField& v, const MetricField& m,
                        std::span<const Point> points, const L211Params& params);

}  // namespace degen
