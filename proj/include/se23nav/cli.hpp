#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace se23nav {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitSelftestFailed = 1,
  kExitConfig = 2,
  kExitRuntime = 3,
  kExitIo = 4,
};

/// Command-line overrides. They take precedence over the config file, which
/// takes precedence over built-in defaults.
struct CliOptions {
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  bool quick = false;
  bool verbose = false;
  bool inject_fault = false;
};

/// Simulates the configured scenario, writes the logs (imu.csv,
/// observations.csv, ground_truth.csv, landmarks.csv), metrics_<mode>.csv per
/// gravity mode and replay.cfg into the output directory, and prints a summary.
int run_simulate(const CliOptions& options, std::ostream& out, std::ostream& err);

/// Runs the observer over recorded logs named by the config (imu_path,
/// obs_path, landmarks, optional truth_path).
int run_replay(const CliOptions& options, std::ostream& out, std::ostream& err);

/// Runs the built-in verification suites and prints a pass/fail table.
int run_selftest(const CliOptions& options, std::ostream& out, std::ostream& err);

}  // namespace se23nav
