#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "collapsar/config.hpp"

namespace collapsar::cli {

/// Process exit codes: the complete set the tool returns.
enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,      // unreadable/invalid config, parameter validation, unwritable output
  kNumericalFailure = 3,  // integration or evaluation failed
  kThresholdFailure = 4,  // verify ran but residuals exceed the configured thresholds
};

struct Overrides {
  std::optional<std::filesystem::path> out;
  std::optional<std::string> formats;  // comma separated subset of csv,json,svg
};

/// Commands proper. They write their artifacts into cfg.output.directory and
/// return kOk or kThresholdFailure; everything else is reported by throwing.
int cmd_solve(const RunConfig& cfg);
int cmd_verify(const RunConfig& cfg);
int cmd_blowup(const RunConfig& cfg);
int cmd_legacy(const RunConfig& cfg);

/// Loads the config, applies overrides, runs `command` and maps any failure
/// to its exit code with a diagnostic on stderr. Never throws.
int run_command(std::string_view command, const std::filesystem::path& config_path, const Overrides& overrides = {});

/// Sets the log level from COLLAPSAR_LOG (error, warn, info, debug; default warn).
void configure_logging();

}  // namespace collapsar::cli
