// homest <simulate|bayes|fisher|correlate|spectrum|sweep> --config FILE [--set key=value ...] --out DIR
//
// Exit codes: 0 ok, 2 configuration error, 3 numerical failure, 4 I/O failure, 1 anything else.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "config.hpp"
#include "homest/error.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

void setup_logging() {
  spdlog::set_default_logger(spdlog::stderr_color_mt("homest"));
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("HOMEST_LOG_LEVEL"); env != nullptr && *env != '\0') {
    const auto level = spdlog::level::from_str(env);
    // from_str maps anything unknown to "off"
    if (level == spdlog::level::off && std::string(env) != "off") {
      spdlog::warn("ignoring unknown HOMEST_LOG_LEVEL '{}'", env);
    } else {
      spdlog::set_level(level);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  namespace cli = homest::cli;

  CLI::App app{"Parameter estimation from simulated homodyne records"};
  app.require_subcommand(1, 1);
  std::string config_file;
  std::vector<std::string> overrides;
  std::string out_dir;
  bool print_config = false;
  for (const auto& name : cli::command_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_file, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--set", overrides, "override one key, e.g. simulation.n_traj=200 (repeatable)");
    sub->add_option("--out", out_dir, "output directory (overrides output.directory)");
    sub->add_flag("--print-config", print_config, "print the resolved configuration and exit");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    const cli::ExperimentConfig config = cli::resolve_config(config_file, overrides, out_dir);
    if (print_config) {
      std::cout << cli::to_json(config).dump(2) << "\n";
      return 0;
    }
    cli::run_command(command, config);
  } catch (const cli::ConfigError& e) {
    spdlog::error("config: {}", e.what());
    return kExitConfig;
  } catch (const homest::InvalidArgument& e) {
    // raised by the library on values that passed the schema but not the physics
    spdlog::error("invalid setting: {}", e.what());
    return kExitConfig;
  } catch (const homest::NumericalFailure& e) {
    spdlog::error("numerical failure: {}", e.what());
    return kExitNumerical;
  } catch (const homest::IoFailure& e) {
    spdlog::error("I/O: {}", e.what());
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    spdlog::error("I/O: {}", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
