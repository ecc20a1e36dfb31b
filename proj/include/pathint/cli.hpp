#pragma once

// Batch experiment runner behind the `pathint` command.
//
// A config is a JSON object
//   { "experiment": "<name>", "seed": 7, "output_dir": "out", "params": { ... } }
// and a run writes <output_dir>/result.json, one CSV per table and an
// appended run.log with wall-clock timings (kept out of result.json so that
// identical configs give byte-identical results).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace pathint::cli {

enum ExitCode : int {
  kPass = 0,
  kIdentityFailure = 1,
  kConfigError = 2,
  kNonConvergence = 3,
};

struct ExperimentInfo {
  std::string name;
  std::string description;
  std::vector<std::string> required;
  std::vector<std::string> optional;
  bool needs_seed;
};

const std::vector<ExperimentInfo>& experiments();

/// Library operation -> experiments that exercise it.
struct Coverage {
  std::string operation;
  std::vector<std::string> experiments;
};
const std::vector<Coverage>& coverage();

std::string list_experiments();

/// Closest experiment name by edit distance.
std::string suggest_experiment(const std::string& name);

struct RunOptions {
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
};

struct RunOutcome {
  int exit_code;
  std::string message;  ///< one-line summary or diagnostics
  std::filesystem::path result_file;
};

RunOutcome run_config_file(const std::filesystem::path& config, const RunOptions& opt = {});

/// Relative output directories resolve against `base`.
RunOutcome run_config_text(const std::string& json_text, const RunOptions& opt = {},
                           const std::filesystem::path& base = std::filesystem::current_path());

std::string version();

}  // namespace pathint::cli
