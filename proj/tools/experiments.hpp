#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace kquant::cli {

enum ExitCode : int { kOk = 0, kInvariantViolation = 1, kConfigInvalid = 2, kNumericalFailure = 3 };

struct RunOptions {
  /// Overrides the config's `output` when nonempty.
  std::string output_dir;
  int jobs = 1;
  /// Overrides the config's fuzz/corpus seed when set.
  std::optional<std::uint64_t> seed;
  /// Treat unstable slope fits as numerical failures.
  bool strict = false;
  /// Path recorded in the metadata file.
  std::string config_path;
};

struct RunSummary {
  int exit_code = kOk;
  int cases = 0;
  int failed_invariants = 0;
  /// "case: message" for every case that threw.
  std::vector<std::string> numerical_failures;
  std::string output_dir;
};

const std::vector<std::string>& experiment_names();

/// Schema and range checks without running numerics: known experiment, no
/// unknown keys, values in range, referenced files present. Throws
/// ConfigInvalid.
void validate(const ExperimentConfig& config);

/// Runs the experiment and writes results.json, summary.txt, metadata.json
/// and the .dat curve files into the output directory. Throws ConfigInvalid.
RunSummary run(const ExperimentConfig& config, const RunOptions& options);

}  // namespace kquant::cli
