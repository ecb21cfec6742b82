#pragma once

#include "degen/lemma_oracle.hpp"
#include "degen/solver.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace degen::cli {

/// Parse or validation failure; line is 0 when the problem is not tied to one line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& msg);
  int line() const { return line_; }

 private:
  int line_;
};

struct DiagnosticsConfig {
  std::vector<double> deltas{0.1};
  double nu = 0.5;
  std::vector<Point> centers;  ///< defaults to the middle of the cube
  std::vector<double> radii{0.25};
  std::vector<double> holder_alphas{0.25, 0.5, 0.75, 1.0};
  double holder_max_dist = 0.25;
};

struct LemmaConfig {
  std::vector<LemmaId> ids;
  std::int64_t budget = 10000;
  std::uint64_t seed = 1;
  std::vector<double> p_values{1.5, 2.0, 3.0};
};

struct RunConfig {
  std::optional<ProblemSpec> problem;
  SolveOptions solver;
  std::optional<DiagnosticsConfig> diagnostics;
  bool duality = false;
  std::optional<LemmaConfig> lemmas;
  std::string out_dir = "out";
};

/// Line-oriented `key = value` under `[section]` headers; `#` starts a comment. Unknown
/// sections or keys, duplicates, malformed values and constraint violations throw ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace degen::cli
