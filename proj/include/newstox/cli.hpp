#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "newstox/pipeline.hpp"

namespace newstox {

/// Exit statuses shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitInvalid = 1, kExitRuntime = 2 };

struct CliConfig {
  std::string subcommand;
  std::filesystem::path articles;
  std::filesystem::path media;
  std::vector<std::filesystem::path> features;  // manifest paths
  std::filesystem::path out;
  std::string setups = "all";
  int verbosity = 0;
  PipelineConfig pipeline{};
};

/// Reads a JSON run configuration into `cfg`. Relative paths resolve against
/// the file's directory. Unknown keys raise ConfigError.
void load_run_config(const std::filesystem::path& path, CliConfig& cfg);

/// Loads corpus and feature files, prints a coverage table and exits 0 iff
/// everything is valid; otherwise prints one JSON error object per line.
int cmd_validate(const CliConfig& cfg, std::ostream& out);

/// Writes stylo and media vector files (+ manifests) into cfg.out.
int cmd_featurize(const CliConfig& cfg, std::ostream& out);

/// Runs the selected setups, writing <out>/setup_NN/{report.json,confusion.csv,summary.txt}
/// and <out>/table3.csv.
int cmd_run(const CliConfig& cfg, std::ostream& out);

/// Parses argv (without the program name) and dispatches. Errors are written
/// to `err` and mapped to the exit codes above.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace newstox
