#pragma once

#include <optional>
#include <string>
#include <vector>

#include "app/config.hpp"
#include "core/errors.hpp"

namespace kropina::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSampling = 3;

/// Commands accepted by run_command.
const std::vector<std::string>& command_names();

/// Output of one command. `report_json` is always set; `csv` only for the geodesic and
/// indicatrix commands. Paths are where the caller should write each artifact, taken
/// from the config; absent means the caller decides.
struct CommandResult {
  int exit_code = kExitOk;
  std::string summary;  // one line, no trailing newline
  std::string report_json;
  std::optional<std::string> csv;
  std::optional<std::string> report_path;
  std::optional<std::string> csv_path;
};

/// 2 for ConfigError, 3 for SamplingError, 1 otherwise.
int exit_code_for(ErrorKind kind);

/// Runs one command. Throws kropina::Error subclasses; the caller maps them with
/// exit_code_for. Deterministic for a fixed config.
CommandResult run_command(const std::string& command, const RunConfig& config);

}  // namespace kropina::app
