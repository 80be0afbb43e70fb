#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "homest/qops.hpp"

namespace homest {

/// Default step for every central finite difference in θ (units of γ).
inline constexpr double kDefaultDTheta = 1e-4;

/// Homodyne channel: which collapse operator is monitored, at which local-oscillator phase Φ
/// (radians) and detection efficiency η ∈ [0, 1].
struct MeasurementChannel {
  std::size_t monitored_index = 0;
  double phase = 0.0;
  double efficiency = 1.0;
};

/// Open quantum system whose Hamiltonian and collapse operators depend on a single unknown
/// parameter θ. Rates are in units of γ and times in units of 1/γ.
class SystemModel {
 public:
  using OperatorFactory = std::function<Operator(double)>;
  using CollapseFactory = std::function<std::vector<Operator>(double)>;

  struct Definition {
    int dim = 2;
    OperatorFactory hamiltonian;
    CollapseFactory collapse_ops;
    /// ∂H/∂θ when known in closed form; otherwise ∂L/∂θ is a central difference.
    OperatorFactory hamiltonian_derivative;
    /// True when the collapse operators do not depend on θ.
    bool collapse_independent_of_theta = true;
    MeasurementChannel channel;
    std::string parameter_name = "theta";
    std::string parameter_units = "gamma";
    /// Canonical text identifying the configuration; hashed into the fingerprint.
    std::string description;
  };

  explicit SystemModel(Definition def);

  int dim() const { return def_.dim; }
  const MeasurementChannel& channel() const { return def_.channel; }
  double phase() const { return def_.channel.phase; }
  double efficiency() const { return def_.channel.efficiency; }
  const std::string& parameter_name() const { return def_.parameter_name; }
  const std::string& parameter_units() const { return def_.parameter_units; }
  const std::string& description() const { return def_.description; }

  Operator hamiltonian(double theta) const;
  std::vector<Operator> collapse_ops(double theta) const;
  Operator monitored_operator(double theta) const;

  Superoperator liouvillian(double theta) const;
  /// 𝓧_Φ for the monitored channel (η not included).
  Superoperator measurement(double theta) const;
  Superoperator liouvillian_derivative(double theta, double dtheta = kDefaultDTheta) const;
  Superoperator measurement_derivative(double theta, double dtheta = kDefaultDTheta) const;

  DensityMatrix steady_state(double theta) const;
  /// ∂ρ_st/∂θ by central difference of two null-space solves.
  DensityMatrix steady_state_derivative(double theta, double dtheta = kDefaultDTheta) const;

  SystemModel with_channel(MeasurementChannel channel) const;
  SystemModel with_phase(double phase) const;
  SystemModel with_efficiency(double efficiency) const;

  /// FNV-1a hash of the description and channel.
  std::uint64_t fingerprint() const;

 private:
  Definition def_;
};

enum class RabiParameter { kOmega, kDetuning };

/// Resonance-fluorescence qubit: H = −δ σ₊σ₋ + (Ω/2)(σ₋ + σ₊), c = √γ σ₋.
/// The unknown θ replaces Ω (default) or δ.
struct QubitConfig {
  double omega = 1.0;
  double detuning = 0.0;
  double gamma = 1.0;
  double phase = 0.0;
  double efficiency = 1.0;
  RabiParameter parameter = RabiParameter::kOmega;
};

SystemModel make_qubit_model(const QubitConfig& config);

/// Value of the unknown parameter in a qubit configuration.
double true_parameter(const QubitConfig& config);

namespace pauli {
Operator sigma_minus();
Operator sigma_plus();
Operator sigma_x();
Operator sigma_y();
Operator sigma_z();
/// σ_Φ = cos Φ σ_x − sin Φ σ_y.
Operator sigma_phi(double phase);
Operator ground();
Operator excited();
}  // namespace pauli

}  // namespace homest
