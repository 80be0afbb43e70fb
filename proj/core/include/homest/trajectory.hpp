#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "homest/model.hpp"
#include "homest/rng.hpp"

namespace homest {

enum class InitialState { kSteadyState, kGround };

/// Time-discretized homodyne record. dy[i] = J(t_i)·dt is the current integrated over step i, so
/// dy[i] = √η Tr[𝓧_Φ ρ_i] dt + ΔW_i with ΔW_i ~ Normal(0, dt).
struct MeasurementRecord {
  double dt = 1e-3;
  std::vector<double> dy;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  double theta_true = 0.0;
  std::uint64_t model_fingerprint = 0;

  std::size_t n_steps() const { return dy.size(); }
  double duration() const { return dt * static_cast<double>(dy.size()); }
  /// J(t_i) = dy_i / dt.
  double current(std::size_t i) const { return dy[i] / dt; }

  bool operator==(const MeasurementRecord&) const = default;
};

/// Discretization of the conditional master equation. Both are first order in dt and share the
/// record convention (dy emitted from the pre-update state) and the per-step repair.
enum class SmeScheme {
  /// ρ' ∝ MρM† + …, positive by construction (see KrausPolynomial in the sources).
  kKraus,
  /// ρ' = ρ + Lρ dt + √η ΔW (𝓧_Φ − Tr[𝓧_Φρ]) ρ. At η = 1 the clipping repair acts on a sizeable
  /// fraction of steps and behaves like extra dephasing.
  kEulerMaruyama,
};

struct SimulationOptions {
  double duration = 10.0;
  double dt = 1e-3;
  InitialState initial = InitialState::kSteadyState;
  SmeScheme scheme = SmeScheme::kKraus;
  bool keep_states = false;
};

/// Counters for the per-step state repair (symmetrize, clip negative eigenvalues, renormalize).
struct RepairStats {
  std::size_t steps = 0;
  /// Steps whose pre-repair minimum eigenvalue was below −1e-9.
  std::size_t negative_steps = 0;
  std::size_t clipped_steps = 0;
  double min_eigenvalue = 0.0;
  double min_purity = 1.0;
};

/// Conditional states ρ_0 .. ρ_n in Hermitian-basis coordinates.
class StatePath {
 public:
  StatePath() = default;
  StatePath(int dim, std::size_t n_states);

  std::size_t size() const { return n_states_; }
  std::span<const double> coordinates(std::size_t i) const;
  std::span<double> coordinates(std::size_t i);
  DensityMatrix state(std::size_t i) const;

 private:
  int dim_ = 0;
  std::size_t n_states_ = 0;
  std::vector<double> coords_;
};

struct Trajectory {
  MeasurementRecord record;
  std::optional<StatePath> states;
  RepairStats repairs;
};

/// Integrates the conditional master equation
///   dρ = L ρ dt + √η dW (𝓧_Φ − Tr[𝓧_Φ ρ]) ρ
/// with the chosen scheme, followed by clipping of negative eigenvalues and trace
/// renormalization. dy_i is emitted from the pre-update state. Logs a warning for dt > 0.01; throws NumericalFailure on a non-finite
/// state and InvalidArgument on bad options.
Trajectory simulate_homodyne(const SystemModel& model, double theta_true, const SimulationOptions& options,
                             RngSpec rng);

/// n_traj records on streams 0 .. n_traj − 1; identical bytes for any worker count.
std::vector<MeasurementRecord> simulate_ensemble(const SystemModel& model, double theta, const SimulationOptions& options,
                                                 std::size_t n_traj, std::uint64_t base_seed, unsigned workers = 0);

/// Streams an ensemble through `reduce` without holding every record in memory. Results are
/// returned in stream order.
template <class Result>
std::vector<Result> map_ensemble(const SystemModel& model, double theta, const SimulationOptions& options,
                                 std::size_t n_traj, std::uint64_t base_seed, unsigned workers,
                                 const std::function<Result(std::size_t, const Trajectory&)>& reduce);

}  // namespace homest

#include "homest/parallel.hpp"

namespace homest {

template <class Result>
std::vector<Result> map_ensemble(const SystemModel& model, double theta, const SimulationOptions& options,
                                 std::size_t n_traj, std::uint64_t base_seed, unsigned workers,
                                 const std::function<Result(std::size_t, const Trajectory&)>& reduce) {
  return parallel_map<Result>(n_traj, workers, [&](std::size_t k) {
    return reduce(k, simulate_homodyne(model, theta, options, RngSpec{base_seed, k}));
  });
}

}  // namespace homest
