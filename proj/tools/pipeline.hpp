#pragma once

#include "config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace degen::cli {

enum class Command { solve, diagnose, duality, verify_lemmas, run };

inline constexpr int kExitOk = 0;
inline constexpr int kExitStage = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolve = 3;
inline constexpr int kExitCheck = 4;

struct Artifact {
  std::string name;
  std::string body;
};

/// Runs the stages selected by `cmd` and present in the config, writes the artifacts and a
/// manifest into cfg.out_dir, and returns the exit status. Progress goes to `log`, errors
/// (naming the failing stage) to `err`.
int execute(const RunConfig& cfg, Command cmd, std::ostream& log, std::ostream& err);

/// The artifacts alone, without touching the filesystem. Throws on stage failure.
std::vector<Artifact> produce(const RunConfig& cfg, Command cmd, std::ostream& log,
                              bool& checks_passed);

/// Manifest text: a timestamp line, then "<fnv1a> <bytes> <name>" per artifact.
std::string manifest(const std::vector<Artifact>& artifacts, const std::string& timestamp);

}  // namespace degen::cli
