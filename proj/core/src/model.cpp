#include "homest/model.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <string>

#include "homest/error.hpp"

namespace homest {

namespace pauli {

Operator sigma_minus() {
  Operator s = Operator::Zero(2, 2);
  s(0, 1) = 1.0;  // |g⟩⟨e|
  return s;
}

Operator sigma_plus() { return sigma_minus().adjoint(); }

Operator sigma_x() { return sigma_minus() + sigma_plus(); }

// σ₋ = (σ_x − iσ_y)/2 fixes σ_y = i(σ₋ − σ₊).
Operator sigma_y() { return Complex{0.0, 1.0} * (sigma_minus() - sigma_plus()); }

Operator sigma_z() { return excited() - ground(); }

Operator sigma_phi(double phase) { return std::cos(phase) * sigma_x() - std::sin(phase) * sigma_y(); }

Operator ground() {
  Operator g = Operator::Zero(2, 2);
  g(0, 0) = 1.0;
  return g;
}

Operator excited() {
  Operator e = Operator::Zero(2, 2);
  e(1, 1) = 1.0;
  return e;
}

}  // namespace pauli

SystemModel::SystemModel(Definition def) : def_(std::move(def)) {
  if (def_.dim < 2) throw InvalidArgument("SystemModel: dim must be at least 2");
  if (!def_.hamiltonian || !def_.collapse_ops) throw InvalidArgument("SystemModel: missing operator factories");
  const double eta = def_.channel.efficiency;
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidArgument("SystemModel: efficiency must lie in [0, 1]");
  if (!std::isfinite(def_.channel.phase)) throw InvalidArgument("SystemModel: phase must be finite");
}

Operator SystemModel::hamiltonian(double theta) const {
  Operator h = def_.hamiltonian(theta);
  if (h.rows() != def_.dim || h.cols() != def_.dim) throw InvalidArgument("SystemModel: Hamiltonian dimension");
  return h;
}

std::vector<Operator> SystemModel::collapse_ops(double theta) const {
  std::vector<Operator> cs = def_.collapse_ops(theta);
  if (def_.channel.monitored_index >= cs.size()) {
    throw InvalidArgument("SystemModel: monitored index out of range");
  }
  return cs;
}

Operator SystemModel::monitored_operator(double theta) const {
  return collapse_ops(theta)[def_.channel.monitored_index];
}

Superoperator SystemModel::liouvillian(double theta) const {
  const std::vector<Operator> cs = collapse_ops(theta);
  return build_liouvillian(hamiltonian(theta), cs);
}

Superoperator SystemModel::measurement(double theta) const {
  return measurement_superop(monitored_operator(theta), def_.channel.phase);
}

Superoperator SystemModel::liouvillian_derivative(double theta, double dtheta) const {
  if (def_.hamiltonian_derivative && def_.collapse_independent_of_theta) {
    const Operator dh = def_.hamiltonian_derivative(theta);
    return (left_multiply(dh) - right_multiply(dh)) * Complex{0.0, -1.0};
  }
  const Superoperator plus = liouvillian(theta + dtheta);
  const Superoperator minus = liouvillian(theta - dtheta);
  return (plus - minus) * Complex{0.5 / dtheta, 0.0};
}

Superoperator SystemModel::measurement_derivative(double theta, double dtheta) const {
  if (def_.collapse_independent_of_theta) return Superoperator::zero(def_.dim);
  const Superoperator plus = measurement(theta + dtheta);
  const Superoperator minus = measurement(theta - dtheta);
  return (plus - minus) * Complex{0.5 / dtheta, 0.0};
}

DensityMatrix SystemModel::steady_state(double theta) const { return homest::steady_state(liouvillian(theta)); }

DensityMatrix SystemModel::steady_state_derivative(double theta, double dtheta) const {
  return (steady_state(theta + dtheta) - steady_state(theta - dtheta)) / (2.0 * dtheta);
}

SystemModel SystemModel::with_channel(MeasurementChannel channel) const {
  Definition def = def_;
  def.channel = channel;
  return SystemModel(std::move(def));
}

SystemModel SystemModel::with_phase(double phase) const {
  MeasurementChannel ch = def_.channel;
  ch.phase = phase;
  return with_channel(ch);
}

SystemModel SystemModel::with_efficiency(double efficiency) const {
  MeasurementChannel ch = def_.channel;
  ch.efficiency = efficiency;
  return with_channel(ch);
}

std::uint64_t SystemModel::fingerprint() const {
  char buf[128];
  std::snprintf(buf, sizeof buf, "|channel=%zu,%.17g,%.17g", def_.channel.monitored_index, def_.channel.phase,
                def_.channel.efficiency);
  const std::string text = def_.description + buf;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

SystemModel make_qubit_model(const QubitConfig& config) {
  if (!(config.gamma > 0.0)) throw InvalidArgument("qubit model: gamma must be positive");
  const double gamma = config.gamma;
  const double omega = config.omega;
  const double detuning = config.detuning;

  SystemModel::Definition def;
  def.dim = 2;
  def.channel = MeasurementChannel{0, config.phase, config.efficiency};
  def.collapse_ops = [gamma](double) { return std::vector<Operator>{std::sqrt(gamma) * pauli::sigma_minus()}; };
  def.collapse_independent_of_theta = true;

  const Operator n_exc = pauli::sigma_plus() * pauli::sigma_minus();
  const Operator drive = 0.5 * (pauli::sigma_minus() + pauli::sigma_plus());
  if (config.parameter == RabiParameter::kOmega) {
    def.hamiltonian = [=](double theta) -> Operator { return -detuning * n_exc + theta * drive; };
    def.hamiltonian_derivative = [=](double) -> Operator { return drive; };
    def.parameter_name = "omega";
  } else {
    def.hamiltonian = [=](double theta) -> Operator { return -theta * n_exc + omega * drive; };
    def.hamiltonian_derivative = [=](double) -> Operator { return -n_exc; };
    def.parameter_name = "detuning";
  }
  def.parameter_units = "gamma";

  char buf[256];
  std::snprintf(buf, sizeof buf, "qubit;omega=%.17g;detuning=%.17g;gamma=%.17g;parameter=%s", omega, detuning, gamma,
                def.parameter_name.c_str());
  def.description = buf;
  return SystemModel(std::move(def));
}

double true_parameter(const QubitConfig& config) {
  return config.parameter == RabiParameter::kOmega ? config.omega : config.detuning;
}

}  // namespace homest
