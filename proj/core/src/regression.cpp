#include "homest/regression.hpp"

#include <cmath>
#include <string>

#include "homest/error.hpp"

namespace homest {

namespace {

// Quantities shared by the regression formulas, in Hermitian-basis coordinates.
struct RegressionSetup {
  HermitianBasis basis;
  Superoperator liouvillian;
  Eigen::MatrixXd measurement;   // real form of 𝓧_Φ
  Eigen::VectorXd trace_x;       // v ↦ Tr[𝓧_Φ ρ]
  Eigen::VectorXd steady;        // ρ_st
  double eta;

  RegressionSetup(const SystemModel& model, double theta)
      : basis(model.dim()), liouvillian(model.liouvillian(theta)), eta(model.efficiency()) {
    measurement = basis.real_matrix(model.measurement(theta));
    trace_x = (basis.trace_row().transpose() * measurement).transpose();
    steady = basis.coordinates(homest::steady_state(liouvillian));
  }

  double mean() const { return std::sqrt(eta) * trace_x.dot(steady); }
};

}  // namespace

double mean_signal(const SystemModel& model, double theta) { return RegressionSetup(model, theta).mean(); }

double qrt_zero_limit(const SystemModel& model, double theta, bool mean_subtract) {
  const RegressionSetup s(model, theta);
  double value = s.eta * s.trace_x.dot(s.measurement * s.steady);
  if (mean_subtract) value -= s.mean() * s.mean();
  return value;
}

std::vector<double> qrt_two_time(const SystemModel& model, double theta, std::span<const double> taus,
                                 bool mean_subtract) {
  double previous = 0.0;
  for (double tau : taus) {
    if (!(tau > 0.0)) throw InvalidArgument("qrt_two_time: lags must be positive");
    if (!(tau > previous)) throw InvalidArgument("qrt_two_time: lags must be strictly increasing");
    previous = tau;
  }

  const RegressionSetup s(model, theta);
  const double offset = mean_subtract ? s.mean() * s.mean() : 0.0;
  Eigen::VectorXd v = s.measurement * s.steady;
  std::vector<double> out;
  out.reserve(taus.size());
  previous = 0.0;
  for (double tau : taus) {
    const Eigen::MatrixXd step = s.basis.real_matrix(propagator(s.liouvillian, tau - previous));
    v = step * v;
    out.push_back(s.eta * s.trace_x.dot(v) - offset);
    previous = tau;
  }
  return out;
}

std::vector<double> qrt_uniform(const SystemModel& model, double theta, double dtau, std::size_t count,
                                bool mean_subtract) {
  if (!(dtau > 0.0)) throw InvalidArgument("qrt_uniform: dtau must be positive");
  const RegressionSetup s(model, theta);
  const double offset = mean_subtract ? s.mean() * s.mean() : 0.0;
  const Eigen::MatrixXd step = s.basis.real_matrix(propagator(s.liouvillian, dtau));
  Eigen::VectorXd v = s.measurement * s.steady;
  Eigen::VectorXd next(v.size());
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    next.noalias() = step * v;
    v.swap(next);
    out[k] = s.eta * s.trace_x.dot(v) - offset;
  }
  return out;
}

double multi_time(const SystemModel& model, double theta, std::span<const double> lags, int n) {
  if (n < 2 || n % 2 != 0) throw InvalidArgument("multi_time: n must be a positive even number");
  if (lags.size() != static_cast<std::size_t>(n - 1)) {
    throw InvalidArgument("multi_time: expected n − 1 = " + std::to_string(n - 1) + " lags");
  }
  for (double tau : lags) {
    if (!(tau > 0.0)) throw InvalidArgument("multi_time: lags must be positive");
  }

  const RegressionSetup s(model, theta);
  Eigen::VectorXd v = s.measurement * s.steady;
  for (double tau : lags) {
    v = s.measurement * (s.basis.real_matrix(propagator(s.liouvillian, tau)) * v);
  }
  // Each of the n currents carries one √η.
  return std::pow(s.eta, n / 2) * s.basis.trace_row().dot(v);
}

}  // namespace homest
