#include "config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace degen::cli {

ConfigError::ConfigError(int line, const std::string& msg)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
      line_(line) {}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  return out;
}

template <class T>
T number(const std::string& text, int line, const std::string& key) {
  T v{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError(line, key + ": expected a number, got '" + text + "'");
  }
  return v;
}

std::vector<double> number_list(const std::string& text, int line, const std::string& key) {
  std::vector<double> out;
  if (text.empty()) return out;
  for (const std::string& item : split(text, ',')) out.push_back(number<double>(item, line, key));
  return out;
}

/// Points separated by ';', coordinates by whitespace.
std::vector<Point> point_list(const std::string& text, int line, const std::string& key) {
  std::vector<Point> out;
  for (const std::string& item : split(text, ';')) {
    std::istringstream is(item);
    std::vector<double> c;
    std::string tok;
    while (is >> tok) c.push_back(number<double>(tok, line, key));
    if (c.empty() || c.size() > static_cast<std::size_t>(kMaxDim)) {
      throw ConfigError(line, key + ": malformed point '" + item + "'");
    }
    Point x(static_cast<int>(c.size()));
    for (std::size_t a = 0; a < c.size(); ++a) x[static_cast<int>(a)] = c[a];
    out.push_back(x);
  }
  return out;
}

void check(bool ok, int line, const std::string& msg) {
  if (!ok) throw ConfigError(line, msg);
}

using Setter = std::function<void(const std::string& value, int line)>;

struct Section {
  std::map<std::string, Setter> keys;
  int line = 0;
};

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  ProblemSpec problem;
  DiagnosticsConfig diag;
  LemmaConfig lemmas;
  lemmas.ids = all_lemmas();

  std::map<std::string, Section> sections;
  auto& pr = sections["problem"].keys;
  pr["dim"] = [&](const std::string& v, int l) { problem.dim = number<int>(v, l, "dim"); };
  pr["res"] = [&](const std::string& v, int l) { problem.res = number<int>(v, l, "res"); };
  pr["metric"] = [&](const std::string& v, int) { problem.metric = v; };
  pr["metric_params"] = [&](const std::string& v, int l) {
    problem.metric_params = number_list(v, l, "metric_params");
  };
  pr["p"] = [&](const std::string& v, int l) {
    problem.p = number<double>(v, l, "p");
    check(problem.p > 1.0, l, "p must exceed 1");
  };
  pr["big_n"] = [&](const std::string& v, int l) { problem.big_n = number<int>(v, l, "big_n"); };
  pr["datum"] = [&](const std::string& v, int) { problem.datum = v; };
  pr["datum_params"] = [&](const std::string& v, int l) {
    problem.datum_params = number_list(v, l, "datum_params");
  };

  SolveOptions& so = cfg.solver;
  auto& sv = sections["solver"].keys;
  sv["eps_schedule"] = [&](const std::string& v, int l) {
    problem.eps_schedule = number_list(v, l, "eps_schedule");
    check(!problem.eps_schedule.empty(), l, "eps_schedule must not be empty");
  };
  sv["tol"] = [&](const std::string& v, int l) {
    so.tol = number<double>(v, l, "tol");
    check(so.tol >= 0.0, l, "tol must be nonnegative");
  };
  sv["max_iter"] = [&](const std::string& v, int l) {
    so.max_iter = number<int>(v, l, "max_iter");
    check(so.max_iter >= 1, l, "max_iter must be positive");
  };
  sv["seed"] = [&](const std::string& v, int l) { so.seed = number<std::uint64_t>(v, l, "seed"); };
  sv["method"] = [&](const std::string& v, int l) {
    check(v == "ncg" || v == "newton", l, "method must be ncg or newton");
    so.method = v == "ncg" ? SolveMethod::ncg : SolveMethod::newton;
  };
  sv["init"] = [&](const std::string& v, int l) {
    check(v == "datum" || v == "zero" || v == "random", l, "init must be datum, zero or random");
    so.init = v == "datum" ? InitialGuess::datum : v == "zero" ? InitialGuess::zero : InitialGuess::random;
  };

  auto& dg = sections["diagnostics"].keys;
  dg["delta"] = [&](const std::string& v, int l) {
    diag.deltas = number_list(v, l, "delta");
    check(!diag.deltas.empty(), l, "delta list must not be empty");
    for (double d : diag.deltas) check(d > 0.0 && d <= 1.0, l, "delta entries must lie in (0,1]");
  };
  dg["nu"] = [&](const std::string& v, int l) {
    diag.nu = number<double>(v, l, "nu");
    check(diag.nu > 0.0 && diag.nu < 1.0, l, "nu must lie in (0,1)");
  };
  dg["centers"] = [&](const std::string& v, int l) { diag.centers = point_list(v, l, "centers"); };
  dg["radii"] = [&](const std::string& v, int l) {
    diag.radii = number_list(v, l, "radii");
    check(!diag.radii.empty(), l, "radii must not be empty");
    for (double r : diag.radii) check(r > 0.0, l, "radii must be positive");
  };
  dg["holder_alphas"] = [&](const std::string& v, int l) {
    diag.holder_alphas = number_list(v, l, "holder_alphas");
    for (double a : diag.holder_alphas) check(a > 0.0 && a <= 1.0, l, "holder_alphas must lie in (0,1]");
  };
  dg["holder_max_dist"] = [&](const std::string& v, int l) {
    diag.holder_max_dist = number<double>(v, l, "holder_max_dist");
    check(diag.holder_max_dist > 0.0, l, "holder_max_dist must be positive");
  };

  sections["duality"];

  auto& lm = sections["lemmas"].keys;
  lm["ids"] = [&](const std::string& v, int l) {
    if (v == "all") {
      lemmas.ids = all_lemmas();
      return;
    }
    lemmas.ids.clear();
    for (const std::string& name : split(v, ',')) {
      try {
        lemmas.ids.push_back(parse_lemma(name));
      } catch (const std::invalid_argument&) {
        throw ConfigError(l, "unknown lemma id '" + name + "'");
      }
    }
  };
  lm["budget"] = [&](const std::string& v, int l) {
    lemmas.budget = number<std::int64_t>(v, l, "budget");
    check(lemmas.budget >= 1000, l, "budget must be at least 1000");
  };
  lm["seed"] = [&](const std::string& v, int l) { lemmas.seed = number<std::uint64_t>(v, l, "seed"); };
  lm["p_values"] = [&](const std::string& v, int l) {
    lemmas.p_values = number_list(v, l, "p_values");
    check(!lemmas.p_values.empty(), l, "p_values must not be empty");
    for (double p : lemmas.p_values) check(p > 1.0, l, "p must exceed 1");
  };

  auto& out = sections["output"].keys;
  out["directory"] = [&](const std::string& v, int l) {
    check(!v.empty(), l, "directory must not be empty");
    cfg.out_dir = v;
  };
  out["formats"] = [&](const std::string& v, int l) {
    for (const std::string& f : split(v, ',')) check(f == "csv", l, "unsupported format '" + f + "'");
  };

  std::set<std::string> present;
  std::set<std::pair<std::string, std::string>> seen;
  std::string current;
  std::istringstream is(text);
  std::string raw;
  for (int line = 1; std::getline(is, raw); ++line) {
    const std::string s = trim(raw.substr(0, raw.find('#')));
    if (s.empty()) continue;
    if (s.front() == '[') {
      check(s.back() == ']', line, "malformed section header");
      current = trim(s.substr(1, s.size() - 2));
      check(sections.count(current) == 1, line, "unknown section [" + current + "]");
      check(present.insert(current).second, line, "duplicate section [" + current + "]");
      sections[current].line = line;
      continue;
    }
    const auto eq = s.find('=');
    check(eq != std::string::npos, line, "expected key = value");
    check(!current.empty(), line, "key outside any section");
    const std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
    auto& keys = sections[current].keys;
    const auto it = keys.find(key);
    check(it != keys.end(), line, "unknown key '" + key + "' in [" + current + "]");
    check(seen.insert({current, key}).second, line, "duplicate key '" + key + "'");
    it->second(value, line);
  }

  const bool has_problem = present.count("problem") == 1;
  for (const char* dep : {"solver", "diagnostics", "duality"}) {
    if (present.count(dep) && !has_problem) {
      throw ConfigError(sections[dep].line, std::string("[") + dep + "] needs a [problem] section");
    }
  }
  if (has_problem) {
    try {
      problem.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(sections["problem"].line, e.what());
    }
    check(!problem.eps_schedule.empty(), sections["solver"].line, "eps_schedule must not be empty");
    cfg.problem = problem;
  }
  if (present.count("diagnostics")) {
    const int l = sections["diagnostics"].line;
    if (diag.centers.empty()) diag.centers.push_back(Point::Constant(problem.dim, 0.5));
    for (const Point& c : diag.centers) {
      check(c.size() == problem.dim, l, "centers must have dim coordinates");
    }
    check((problem.res + 1) / 2 >= 3, l, "res too small for the coarse Holder grid");
    cfg.diagnostics = diag;
  }
  if (present.count("duality")) {
    const int l = sections["duality"].line;
    check(problem.big_n == 1, l, "duality needs big_n = 1");
    check(problem.metric == "identity", l, "duality needs the identity metric");
    cfg.duality = true;
  }
  if (present.count("lemmas")) cfg.lemmas = lemmas;
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(0, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace degen::cli
