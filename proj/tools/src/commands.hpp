#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace torsionlab::cli {

enum ExitCode : int { exit_ok = 0, exit_failure = 1, exit_config = 2, exit_certification = 3 };

struct CommandOptions {
  /// Adds wall-clock seconds to the summary (breaks byte-identical reruns).
  bool wall_time = false;
};

struct CommandInfo {
  const char* name;
  const char* help;
};

const std::vector<CommandInfo>& commands();

/// Runs one analysis command and writes its artifacts under out_dir. Errors
/// propagate as exceptions; the return value is 0 or exit_certification.
int run_command(const std::string& name, const RunConfig& config, const std::string& out_dir,
                const CommandOptions& options = {});

/// Datum of the config on a grid: catalog density times scale plus atoms at the nearest nodes.
DiscreteMeasure make_datum(const DatumSpec& spec, const GridPtr& grid, std::uint64_t seed);

}  // namespace torsionlab::cli
