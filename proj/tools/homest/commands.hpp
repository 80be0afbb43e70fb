#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace homest::cli {

const std::vector<std::string>& command_names();

/// Runs one subcommand and writes its files under config.output.directory. Throws ConfigError,
/// homest::Error subclasses or std::filesystem errors; no files remain after a throw.
void run_command(const std::string& name, const ExperimentConfig& config);

}  // namespace homest::cli
