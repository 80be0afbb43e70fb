#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "homest/model.hpp"

namespace homest::cli {

using Json = nlohmann::ordered_json;

/// Anything wrong with the configuration: unreadable syntax, unknown key, wrong type, bad value.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelBlock {
  double omega = 1.0;
  double detuning = 0.0;
  double gamma = 1.0;
  double phase = 1.5707963267948966;
  double efficiency = 1.0;
  std::string parameter = "omega";  // omega | detuning
};

struct SimulationBlock {
  double duration = 20.0;
  double dt = 1e-3;
  std::size_t n_traj = 10;
  std::uint64_t base_seed = 1;
  std::string initial = "steady_state";  // steady_state | ground
  std::string scheme = "kraus";          // kraus | euler_maruyama
  bool keep_states = false;
};

struct AnalysisBlock {
  // θ grid for bayes
  double grid_lo = 0.5;
  double grid_hi = 4.0;
  std::size_t grid_points = 201;
  std::vector<double> checkpoints;  // empty: the end of the record
  // correlation lags
  double dtau = 0.05;
  std::size_t lags = 40;
  bool mean_subtract = true;
  double dtheta = kDefaultDTheta;
  // QRT integrals and spectra
  double qrt_dtau = 1e-3;
  double tau_max = 40.0;
  double omega_max = 20.0;
  std::size_t omega_points = 2001;
  bool shot_floor = false;
  std::string score_init = "steady_state_derivative";  // steady_state_derivative | zero
  // sweep grid: Φ uniform on [0, π]
  std::size_t sweep_phase_points = 33;
  std::vector<double> sweep_omegas = {0.25, 0.5, 1.0, 2.0, 4.0};
};

struct OutputBlock {
  std::string directory = "out";
  std::string format = "csv";  // csv | json
};

struct ExperimentConfig {
  ModelBlock model;
  SimulationBlock simulation;
  AnalysisBlock analysis;
  OutputBlock output;
  unsigned workers = 0;  // 0: HOMEST_WORKERS, else all cores
};

Json to_json(const ExperimentConfig& config);
/// Strict: every key must be known and of the right type, and values are validated.
ExperimentConfig from_json(const Json& json);

/// Resolution order, later wins: built-in defaults, the config file, HOMEST_WORKERS, each
/// `--set a.b=value` in order, then `--out`. A --set value is parsed as JSON when it parses,
/// otherwise taken as a string.
ExperimentConfig resolve_config(const std::filesystem::path& file, const std::vector<std::string>& overrides,
                                const std::string& out_dir);

QubitConfig qubit_config(const ModelBlock& model);
/// Checkpoint times; the record end when none were given.
std::vector<double> checkpoint_times(const ExperimentConfig& config);

}  // namespace homest::cli
