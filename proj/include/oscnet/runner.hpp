#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "oscnet/config.hpp"

namespace oscnet {

inline constexpr const char* kToolVersion = "0.1.0";

/// Public exit-status taxonomy.
enum ExitStatus : int { kExitOk = 0, kExitValidation = 1, kExitNumerical = 2, kExitInconclusive = 3 };

struct RunOptions {
  std::optional<std::uint64_t> seed;           // overrides config.seed
  std::optional<std::string> output_directory;  // overrides output.directory
  unsigned threads = 1;
};

struct RunResult {
  int exit_status = kExitOk;
  std::string message;
  std::filesystem::path directory;
  std::vector<std::string> files;  // deterministic outputs, in write order
};

/// Executes the configured experiment and writes manifest.json, report.json,
/// trace_*.csv and timing.json (wall clock; the only non-reproducible file).
/// Precondition failures surfacing at run time remove this run's files.
RunResult run(ExperimentConfig config, const RunOptions& options);

/// Shortest decimal string that parses back to exactly `x`.
std::string format_double(double x);

}  // namespace oscnet
