// Acceptance suite: one PASS/FAIL line per criterion.
// usage: acceptance <path-to-degen-cli> <path-to-a1.cfg>

#include "degen/diagnostics.hpp"
#include "degen/lemma_oracle.hpp"
#include "degen/random.hpp"
#include "degen/transport.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

using namespace degen;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

ProblemSpec square(const std::string& datum, std::vector<double> params, int res,
                   std::vector<double> schedule) {
  ProblemSpec s;
  s.dim = 2;
  s.res = res;
  s.p = 2.0;
  s.datum = datum;
  s.datum_params = std::move(params);
  s.eps_schedule = std::move(schedule);
  return s;
}

/// Mixed datum 2 x1 x2 with the rate schedule followed by the reference eps.
struct MixedRun {
  Problem problem{square("bilinear", {2.0}, 64, {1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 1e-4})};
  std::vector<SolutionState> states;
  double seconds = 0.0;
};

const MixedRun& mixed() {
  static const MixedRun run = [] {
    MixedRun r;
    Timer t;
    SolveOptions o;
    o.method = SolveMethod::newton;
    r.states = eps_continuation(r.problem, o);
    r.seconds = t.seconds();
    return r;
  }();
  return run;
}

/// Perturbed start, so that solves whose datum is already optimal still have work to do.
SolveOptions random_start() {
  SolveOptions o;
  o.init = InitialGuess::random;
  o.seed = 17;
  return o;
}

std::vector<SolutionState> linear_run(const Problem& problem) {
  return eps_continuation(problem, random_start());
}

Verdict exact_lemmas() {
  Timer t;
  std::string detail;
  bool ok = true;
  for (LemmaId id : {LemmaId::L2_5a, LemmaId::L2_6a, LemmaId::L2_6b, LemmaId::L2_7, LemmaId::L2_8_2}) {
    LemmaCase c;
    c.id = id;
    const LemmaReport r = run_lemma(c, 100000, 1);
    ok = ok && r.samples == 100000 && r.violations == 0;
    detail += r.id + ":" + std::to_string(r.violations) + " ";
  }
  const double s = t.seconds();
  return {ok && s < 60.0, "violations " + detail + "in " + fmt(s) + " s"};
}

Verdict ratio_lemmas() {
  std::string detail;
  bool ok = true;
  for (LemmaId id : {LemmaId::L2_1, LemmaId::L2_2, LemmaId::L2_3a, LemmaId::L2_3b, LemmaId::L2_4,
                     LemmaId::L2_5b, LemmaId::L2_8_1, LemmaId::L2_8_3, LemmaId::L2_Bfreeze,
                     LemmaId::L2_9, LemmaId::L2_10, LemmaId::L2_11}) {
    LemmaCase c;
    c.id = id;
    const LemmaReport r = run_lemma(c, 10000, 1);
    ok = ok && r.passed();
    detail += r.id + "=" + fmt(r.c_emp) + (r.stable ? "" : "(unstable)") + " ";
  }
  return {ok, detail};
}

Verdict oracle_1d() {
  Timer t;
  ProblemSpec s;
  s.dim = 1;
  s.res = 65;
  s.p = 2.0;
  s.datum = "linear";
  s.datum_params = {2.0};
  s.eps_schedule = {0.1};
  const Problem problem(s);
  const SolutionState st = solve_regularized(problem, 0.1, random_start());
  double err = 0.0;
  for (int k = 0; k < problem.grid().num_nodes(); ++k) {
    err = std::max(err, std::abs(st.u(k, 0) - 2.0 * problem.grid().node_coord(k)[0]));
  }
  const double sec = t.seconds();
  return {st.converged && err <= 1e-8 && sec < 1.0,
          "max error " + fmt(err) + " after " + std::to_string(st.iterations) + " iterations in " +
              fmt(sec) + " s"};
}

Verdict zero_energy() {
  const Problem problem(square("linear", {0.9, 0.0}, 33, {1e-3}));
  const SolutionState st = solve_regularized(problem, 1e-3, random_start());
  const double deg = energy_parts(problem, st.u, 1e-3).degenerate;
  const TruncatedGradientField g = g_delta_field(problem, st.u, 0.0);
  double gmax = 0.0;
  for (double v : g.norms) gmax = std::max(gmax, v);
  return {st.converged && deg <= 1e-10 && gmax <= 1e-6,
          "degenerate energy " + fmt(deg) + ", max |G| " + fmt(gmax)};
}

Verdict gradient_bound() {
  const Problem problem(square("linear", {2.0, 0.0}, 33, {1e-1, 1e-2, 1e-3, 1e-4}));
  const auto states = linear_run(problem);
  double lo = 1e300, hi = 0.0;
  for (const SolutionState& st : states) {
    lo = std::min(lo, st.max_grad_norm);
    hi = std::max(hi, st.max_grad_norm);
  }
  const double drift = hi / lo - 1.0;
  return {drift < 0.05, "max |Du| in [" + fmt(lo) + ", " + fmt(hi) + "], drift " + fmt(drift)};
}

Verdict rate() {
  const MixedRun& m = mixed();
  const std::vector<SolutionState> fit(m.states.begin(), m.states.end() - 1);
  const RateReport r = convergence_rate(m.problem, fit, m.states.back(), 0.1);
  const double sec = m.seconds;
  return {!r.exact_match && r.slope >= 0.4 && sec < 300.0,
          "slope " + fmt(r.slope) + ", solves " + fmt(sec) + " s"};
}

Verdict duality() {
  const Problem problem(square("linear", {2.0, 0.0}, 33, {1e-1, 1e-2, 1e-3}));
  const auto states = linear_run(problem);
  const DualityReport r = duality_report(traffic_flow(problem, states.back().u));
  const bool ok = r.div_norm <= 1e-6 && r.max_fy_residual <= 1e-8 &&
                  std::abs(r.primal_energy - 0.5) <= 1e-6 && std::abs(r.dual_energy - 1.5) <= 1e-6 &&
                  std::abs(r.pairing - 2.0) <= 1e-6;
  return {ok, "div " + fmt(r.div_norm) + ", FY " + fmt(r.max_fy_residual) + ", primal " +
                  fmt(r.primal_energy) + ", dual " + fmt(r.dual_energy) + ", pairing " +
                  fmt(r.pairing)};
}

Verdict delta_limit() {
  const MixedRun& m = mixed();
  const NodalField& u = m.states[m.states.size() - 2].u;
  const TruncatedGradientField g0 = g_delta_field(m.problem, u, 0.0);
  double lo = 1e300, hi = 0.0;
  std::string detail;
  for (double delta : {0.1, 0.01, 0.001}) {
    const double q = max_field_distance(m.problem, g_delta_field(m.problem, u, delta), g0) / delta;
    lo = std::min(lo, q);
    hi = std::max(hi, q);
    detail += fmt(q) + " ";
  }
  return {lo > 0.0 && hi / lo - 1.0 < 0.1, "sup|G_d - G|/d: " + detail};
}

Verdict dichotomy() {
  const MixedRun& m = mixed();
  const NodalField& u = m.states[m.states.size() - 2].u;
  const Problem flat(square("linear", {2.0, 0.0}, 33, {1e-1, 1e-2, 1e-3}));
  const NodalField v = linear_run(flat).back().u;
  int exclusive = 0, flat_ok = 0, nd = 0;
  for (std::uint64_t k = 0; k < 50; ++k) {
    SampleRng rng(2024, k);
    Point x0(2);
    x0 << rng.uniform(0.15, 0.85), rng.uniform(0.15, 0.85);
    const double rho = rng.uniform(0.05, 0.3), nu = rng.uniform(0.05, 0.95);
    const ExcessReport r = excess(m.problem, u, x0, rho, 0.1, nu);
    const bool one = r.measure_nd != r.measure_d &&
                     (r.regime == Regime::nondegenerate) == r.measure_nd;
    exclusive += one ? 1 : 0;
    nd += r.measure_nd ? 1 : 0;
    const ExcessReport c = excess(flat, v, x0, rho, 0.1, nu);
    flat_ok += c.regime == Regime::nondegenerate && c.superlevel_fraction == 1.0 ? 1 : 0;
  }
  return {exclusive == 50 && flat_ok == 50,
          std::to_string(exclusive) + "/50 exclusive (" + std::to_string(nd) +
              " nondegenerate), constant gradient " + std::to_string(flat_ok) + "/50"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Manifest without its timestamp line.
std::string manifest_body(const fs::path& p) {
  const std::string m = slurp(p);
  return m.substr(m.find('\n') + 1);
}

Verdict determinism(const std::string& cli, const std::string& config) {
  const fs::path root = fs::temp_directory_path() / "degen_acceptance";
  fs::remove_all(root);
  int codes[2];
  for (int k = 0; k < 2; ++k) {
    const std::string cmd = "\"" + cli + "\" run --config \"" + config + "\" --out \"" +
                            (root / std::to_string(k)).string() + "\" > /dev/null";
    codes[k] = std::system(cmd.c_str());
  }
  if (codes[0] != 0 || codes[1] != 0) return {false, "cli exited nonzero"};
  int files = 0, same = 0;
  for (const auto& e : fs::directory_iterator(root / "0")) {
    if (e.path().extension() != ".csv") continue;
    ++files;
    same += slurp(e.path()) == slurp(root / "1" / e.path().filename()) ? 1 : 0;
  }
  const bool manifests = manifest_body(root / "0" / "manifest.txt") ==
                         manifest_body(root / "1" / "manifest.txt");
  fs::remove_all(root);
  return {files == 4 && same == files && manifests,
          std::to_string(same) + "/" + std::to_string(files) + " CSV bodies identical"};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::fprintf(stderr, "usage: %s <degen-cli> <a1-config>\n", argv[0]);
    return 2;
  }
  const std::string cli = argv[1], config = argv[2];
  const std::pair<const char*, std::function<Verdict()>> criteria[] = {
      {"exact-mode lemmas", exact_lemmas},
      {"ratio-mode lemma constants stable", ratio_lemmas},
      {"1D oracle", oracle_1d},
      {"zero-energy degenerate case", zero_energy},
      {"uniform gradient bound", gradient_bound},
      {"truncated-gradient convergence rate", rate},
      {"duality certificate", duality},
      {"delta -> 0 uniform convergence", delta_limit},
      {"regime dichotomy", dichotomy},
      {"determinism of run", [&] { return determinism(cli, config); }},
  };
  int failed = 0, index = 1;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += v.pass ? 0 : 1;
    std::printf("%s %2d %s: %s\n", v.pass ? "PASS" : "FAIL", index++, name, v.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
