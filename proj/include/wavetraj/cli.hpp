#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wavetraj/scenarios.hpp"

namespace wavetraj {

enum ExitCode : int {
  kExitOk = 0,
  kExitSimulation = 1,
  kExitUsage = 2,
  kExitVerification = 3,
};

struct RunOptions {
  std::string scenario;
  std::optional<std::filesystem::path> config_path;
  Overrides sets;  // --set KEY=VALUE, in command-line order
  std::filesystem::path out_dir = ".";
  bool plot = false;
  bool paper_scale = false;
  bool strict_eq29 = false;
  bool eikonal = false;
  int workers = 1;
};

/// Settings in precedence order: config file, then the switch flags, then
/// --set. Throws ConfigParse or IoFailure for an unreadable file.
Overrides collect_overrides(const RunOptions& options);

/// Splits "key=value"; throws InvalidOverride without an '='.
std::pair<std::string, std::string> parse_set(const std::string& text);

/// Writes trajectories.csv, metrics.csv, summary.json, manifest.json and
/// config.txt (plus the two SVGs with `plot`). A failed simulation still
/// leaves every file behind, with the error recorded in summary.json.
int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err);

struct VerifyCommand {
  std::vector<std::string> subset;
  bool paper_scale = false;  // also run the slow checks
  bool strict_eq29 = false;
  int workers = 1;
};

int cmd_verify(const VerifyCommand& command, std::ostream& out, std::ostream& err);

int cmd_list(std::ostream& out);

int cmd_plot(const std::filesystem::path& csv, const std::filesystem::path& svg, std::ostream& err);

}  // namespace wavetraj
