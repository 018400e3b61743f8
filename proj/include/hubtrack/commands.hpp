#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hubtrack {

enum class ExitCode : int {
  Ok = 0,
  Unexpected = 1,
  Parameter = 2,
  Solver = 3,
  Integrator = 4,
  Constraint = 5,
  Io = 6,
  Consistency = 7,
};

struct CommandOptions {
  std::optional<std::filesystem::path> config;
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;
  /// 0 keeps the OpenMP default.
  int threads = 0;
  std::optional<std::size_t> snapshot_stride;
  std::optional<std::string> observable;
  /// Print the run summary to stdout.
  bool verbose = true;
};

const std::vector<std::string>& command_names();

/**
 * Runs one subcommand end to end: loads the config, executes, writes outputs
 * and manifest.json into out_dir, and maps failures to exit codes.
 */
ExitCode run_command(const std::string& command, const CommandOptions& options);

}  // namespace hubtrack
