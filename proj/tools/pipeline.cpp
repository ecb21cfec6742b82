#include "pipeline.hpp"

#include "degen/csv.hpp"
#include "degen/diagnostics.hpp"
#include "degen/transport.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace degen::cli {

namespace {

/// Failure inside a named stage.
struct StageError : std::runtime_error {
  StageError(std::string stage, const std::string& what, int code)
      : std::runtime_error(what), stage(std::move(stage)), code(code) {}
  std::string stage;
  int code;
};

std::vector<SolutionState> continuation(const Problem& problem, const SolveOptions& opts,
                                        std::ostream& log) {
  try {
    auto states = eps_continuation(problem, opts);
    for (const SolutionState& st : states) {
      log << "  eps=" << fmt_double(st.eps) << " iterations=" << st.iterations
          << " energy=" << fmt_double(st.energy) << " residual=" << fmt_double(st.residual_norm)
          << '\n';
    }
    return states;
  } catch (const SolveError& e) {
    throw StageError("solve", e.what(), kExitSolve);
  }
}

std::string bool_str(bool b) { return b ? "1" : "0"; }

Artifact solution_csv(const SolutionState& st) {
  std::ostringstream os;
  write_nodal_csv(os, st.u);
  return {"solution.csv", os.str()};
}

std::vector<Artifact> diagnose(const Problem& problem, const std::vector<SolutionState>& states,
                               const SolveOptions& opts, const DiagnosticsConfig& dc,
                               std::ostream& log) {
  const SolutionState& fin = states.back();
  std::vector<Artifact> out;

  std::ostringstream ex;
  const int n = problem.grid().n();
  ex << "delta";
  for (int a = 0; a < n; ++a) ex << ",x" << a + 1;
  ex << ",rho,nu,cells,phi,psi_delta,mu,superlevel_fraction,measure_nd,measure_d,regime\n";
  for (double delta : dc.deltas) {
    for (const Point& c : dc.centers) {
      for (double rho : dc.radii) {
        ExcessReport r;
        try {
          r = excess(problem, fin.u, c, rho, delta, dc.nu);
        } catch (const std::invalid_argument& e) {
          throw StageError("diagnose", e.what(), kExitStage);
        }
        ex << fmt_double(delta);
        for (int a = 0; a < n; ++a) ex << ',' << fmt_double(c[a]);
        ex << ',' << fmt_double(rho) << ',' << fmt_double(dc.nu) << ',' << r.cells << ','
           << fmt_double(r.phi) << ',' << fmt_double(r.psi_delta) << ',' << fmt_double(r.mu) << ','
           << fmt_double(r.superlevel_fraction) << ',' << bool_str(r.measure_nd) << ','
           << bool_str(r.measure_d) << ',' << regime_name(r.regime) << '\n';
      }
    }
  }
  out.push_back({"excess.csv", ex.str()});

  ProblemSpec cs = problem.spec();
  cs.res = (cs.res + 1) / 2;
  log << "  coarse re-solve at res=" << cs.res << '\n';
  const Problem coarse(cs);
  const auto coarse_states = continuation(coarse, opts, log);
  std::ostringstream ho;
  ho << "delta,alpha,seminorm_fine,seminorm_coarse,stable\n";
  for (double delta : dc.deltas) {
    const HolderTable t = holder_estimate(g_delta_field(problem, fin.u, delta),
                                          g_delta_field(coarse, coarse_states.back().u, delta),
                                          dc.holder_alphas, dc.holder_max_dist);
    for (const HolderRow& row : t.rows) {
      ho << fmt_double(delta) << ',' << fmt_double(row.alpha) << ','
         << fmt_double(row.seminorm_fine) << ',' << fmt_double(row.seminorm_coarse) << ','
         << bool_str(row.stable) << '\n';
    }
  }
  out.push_back({"holder.csv", ho.str()});

  if (states.size() < 4) {
    log << "  rate skipped: needs at least four schedule entries\n";
    return out;
  }
  const std::vector<SolutionState> fit(states.begin(), states.end() - 1);
  std::ostringstream ra;
  ra << "delta,eps,error,slope,exact_match\n";
  for (double delta : dc.deltas) {
    const RateReport r = convergence_rate(problem, fit, states.back(), delta);
    for (std::size_t k = 0; k < r.eps.size(); ++k) {
      ra << fmt_double(delta) << ',' << fmt_double(r.eps[k]) << ',' << fmt_double(r.errors[k])
         << ',' << fmt_double(r.slope) << ',' << bool_str(r.exact_match) << '\n';
    }
  }
  out.push_back({"rate.csv", ra.str()});
  return out;
}

std::vector<Artifact> duality(const Problem& problem, const SolutionState& st) {
  const FlowField f = traffic_flow(problem, st.u);
  const DualityReport r = duality_report(f);
  const int n = f.grid.n();
  std::vector<std::vector<double>> cols;
  std::vector<std::string> names;
  for (int a = 0; a < n; ++a) {
    std::vector<double> c(f.sigma.size());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = f.sigma[k][a];
    cols.push_back(std::move(c));
    names.push_back("sigma" + std::to_string(a + 1));
  }
  cols.insert(cols.end(), {f.sigma_norm, f.congestion_cost, f.primal_density, f.pairing_density,
                           f.fy_residual});
  names.insert(names.end(),
               {"sigma_norm", "congestion_cost", "primal_density", "pairing_density", "fy_residual"});
  std::ostringstream flow;
  write_cell_csv(flow, f.grid, 1, cols, names);
  std::ostringstream sum;
  sum << "primal_energy=" << fmt_double(r.primal_energy) << '\n'
      << "dual_energy=" << fmt_double(r.dual_energy) << '\n'
      << "pairing=" << fmt_double(r.pairing) << '\n'
      << "duality_gap=" << fmt_double(r.primal_energy + r.dual_energy - r.pairing) << '\n'
      << "div_norm=" << fmt_double(r.div_norm) << '\n'
      << "max_fy_residual=" << fmt_double(r.max_fy_residual) << '\n'
      << "min_fy_residual=" << fmt_double(r.min_fy_residual) << '\n';
  return {{"flow.csv", flow.str()}, {"duality.txt", sum.str()}};
}

Artifact lemma_csv(const LemmaConfig& lc, std::ostream& log, bool& passed) {
  std::ostringstream os;
  os << "id,mode,samples,violations,c_emp,c_emp_half,stable,passed\n";
  for (LemmaId id : lc.ids) {
    LemmaCase c;
    c.id = id;
    c.p_values = lc.p_values;
    const LemmaReport r = run_lemma(c, lc.budget, lc.seed);
    log << "  " << r.id << ' ' << (r.passed() ? "ok" : "FAILED") << " c_emp=" << fmt_double(r.c_emp)
        << '\n';
    passed = passed && r.passed();
    os << r.id << ',' << mode_name(r.mode) << ',' << r.samples << ',' << r.violations << ','
       << fmt_double(r.c_emp) << ',' << fmt_double(r.c_emp_half) << ',' << bool_str(r.stable)
       << ',' << bool_str(r.passed()) << '\n';
  }
  return {"lemmas.csv", os.str()};
}

bool wants(Command cmd, Command stage) { return cmd == Command::run || cmd == stage; }

}  // namespace

std::vector<Artifact> produce(const RunConfig& cfg, Command cmd, std::ostream& log,
                              bool& checks_passed) {
  checks_passed = true;
  const bool need_problem =
      cmd == Command::solve || cmd == Command::diagnose || cmd == Command::duality;
  if (need_problem && !cfg.problem) throw ConfigError(0, "this command needs a [problem] section");
  if (cmd == Command::diagnose && !cfg.diagnostics) {
    throw ConfigError(0, "diagnose needs a [diagnostics] section");
  }
  if (cmd == Command::duality && !cfg.duality) throw ConfigError(0, "duality needs a [duality] section");
  if (cmd == Command::verify_lemmas && !cfg.lemmas) {
    throw ConfigError(0, "verify-lemmas needs a [lemmas] section");
  }
  if (cmd == Command::run && !cfg.problem && !cfg.lemmas) {
    throw ConfigError(0, "nothing to run: no [problem] or [lemmas] section");
  }

  std::vector<Artifact> out;
  if (cfg.problem && cmd != Command::verify_lemmas) {
    log << "stage solve\n";
    const Problem problem(*cfg.problem);
    const auto states = continuation(problem, cfg.solver, log);
    if (wants(cmd, Command::solve)) out.push_back(solution_csv(states.back()));
    if (cfg.diagnostics && wants(cmd, Command::diagnose)) {
      log << "stage diagnose\n";
      for (Artifact& a : diagnose(problem, states, cfg.solver, *cfg.diagnostics, log)) {
        out.push_back(std::move(a));
      }
    }
    if (cfg.duality && wants(cmd, Command::duality)) {
      log << "stage duality\n";
      for (Artifact& a : duality(problem, states.back())) out.push_back(std::move(a));
    }
  }
  if (cfg.lemmas && wants(cmd, Command::verify_lemmas)) {
    log << "stage verify-lemmas\n";
    out.push_back(lemma_csv(*cfg.lemmas, log, checks_passed));
  }
  return out;
}

std::string manifest(const std::vector<Artifact>& artifacts, const std::string& timestamp) {
  std::ostringstream os;
  os << "# created " << timestamp << '\n';
  for (const Artifact& a : artifacts) {
    os << fnv1a_hex(a.body) << ' ' << a.body.size() << ' ' << a.name << '\n';
  }
  return os.str();
}

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  f << body;
  if (!f) throw ConfigError(0, "cannot write " + path.string());
}

}  // namespace

int execute(const RunConfig& cfg, Command cmd, std::ostream& log, std::ostream& err) {
  try {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) throw ConfigError(0, "cannot create output directory " + cfg.out_dir);
    bool passed = true;
    const auto artifacts = produce(cfg, cmd, log, passed);
    const std::filesystem::path dir(cfg.out_dir);
    for (const Artifact& a : artifacts) write_file(dir / a.name, a.body);
    write_file(dir / "manifest.txt", manifest(artifacts, utc_now()));
    log << "wrote " << artifacts.size() << " artifacts to " << cfg.out_dir << '\n';
    if (!passed) {
      err << "stage verify-lemmas: acceptance check failed\n";
      return kExitCheck;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const StageError& e) {
    err << "stage " << e.stage << ": " << e.what() << '\n';
    return e.code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitStage;
  }
}

}  // namespace degen::cli
