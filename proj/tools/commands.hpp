#pragma once

// Verbs of the vicopt command-line tool. Each returns a process exit status
// and logs through spdlog; file-level failures are reported with the path.

#include "vicopt/config.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace vicopt::cli {

enum ExitStatus : int {
  kExitOk = 0,
  /// Episode ended early (non-finite state) or a check failed.
  kExitTerminal = 1,
  kExitUsage = 2,
  kExitInvalidScenario = 3,
  kExitIo = 4,
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> latency;
};

/// Loads the scenario and applies command-line overrides.
Scenario load_with_overrides(const std::filesystem::path& path, const Overrides& overrides);

/// Empty `out_dir` means the scenario's output.dir, else out/<name>.
int cmd_run(const std::filesystem::path& scenario_path, const std::filesystem::path& out_dir,
            const Overrides& overrides = {});
int cmd_fig2(const std::filesystem::path& out_dir);
/// `modes` are mode names; fewer than two is a usage error.
int cmd_compare(const std::vector<std::filesystem::path>& scenario_paths, const std::vector<std::string>& modes,
                const std::filesystem::path& out_dir, const Overrides& overrides = {});
int cmd_validate(const std::filesystem::path& scenario_path);

/// Reads VICOPT_LOG_LEVEL (error, warn, info, debug; default info).
void configure_logging();

}  // namespace vicopt::cli
