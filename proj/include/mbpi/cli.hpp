#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace mbpi {

// Exit codes of `run`.
enum ExitCode : int {
  kExitPass = 0,
  kExitVerdictFailed = 1,
  kExitConfig = 2,
  kExitPrecondition = 3,
  kExitNumeric = 4,
};

struct RunOptions {
  std::optional<std::string> out_dir;  // overrides [output] dir
  int threads = 1;
  std::optional<std::uint64_t> seed;   // overrides [sim] seed
  bool strict = false;                 // warnings are fatal
};

// Runs the experiment described by the config file. Diagnostics go to err,
// verdict lines to out.
int run_experiment(const std::string& config_path, const RunOptions& options, std::ostream& out, std::ostream& err);

std::string list_families();

std::string tool_version();

}  // namespace mbpi
