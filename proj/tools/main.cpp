#include "pipeline.hpp"

#include "degen/parallel.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

using namespace degen::cli;

int main(int argc, char** argv) {
  CLI::App app{"Vanishing-viscosity solver and diagnostics for very degenerate elliptic systems"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  unsigned threads = 0;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "Run configuration")->required();
  app.add_option("--threads", threads, "Worker cap (0 = all cores)");
  app.add_option("--out", out_dir, "Output directory (overrides [output] directory)");
  app.add_option("--seed", seed, "Seed for solver and lemma sampling (overrides the config)");

  const std::pair<const char*, Command> commands[] = {
      {"solve", Command::solve},
      {"diagnose", Command::diagnose},
      {"duality", Command::duality},
      {"verify-lemmas", Command::verify_lemmas},
      {"run", Command::run},
  };
  const char* help[] = {"Solve the eps schedule and write the final solution",
                        "Excess, Holder and rate diagnostics of the final solution",
                        "Traffic flow and duality check for scalar problems",
                        "Randomised lemma checks", "Every stage present in the config"};
  for (std::size_t k = 0; k < std::size(commands); ++k) app.add_subcommand(commands[k].first, help[k]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  Command cmd = Command::run;
  for (const auto& [name, c] : commands)
    if (app.got_subcommand(name)) cmd = c;

  RunConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (seed) {
    cfg.solver.seed = *seed;
    if (cfg.lemmas) cfg.lemmas->seed = *seed;
  }
  degen::set_max_threads(threads);
  return execute(cfg, cmd, std::cout, std::cerr);
}
