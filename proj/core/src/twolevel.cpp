#include "homest/twolevel.hpp"

#include <cmath>

#include <spdlog/spdlog.h>

#include "homest/error.hpp"

namespace homest::twolevel {

namespace {

void require_resonant(const QubitParams& p) {
  if (!(p.gamma > 0.0)) throw InvalidArgument("twolevel: gamma must be positive");
  if (p.detuning != 0.0) throw InvalidArgument("twolevel: closed forms require zero detuning");
  if (!(p.efficiency >= 0.0 && p.efficiency <= 1.0)) throw InvalidArgument("twolevel: efficiency must lie in [0, 1]");
}

}  // namespace

std::array<double, 3> steady_bloch(const QubitParams& p) {
  require_resonant(p);
  const double g2 = p.gamma * p.gamma;
  const double denom = g2 + 2.0 * p.omega * p.omega;
  return {0.0, 2.0 * p.omega * p.gamma / denom, -g2 / denom};
}

double mean_current(const QubitParams& p) {
  return -std::sqrt(p.efficiency * p.gamma) * std::sin(p.phase) * steady_bloch(p)[1];
}

double f1_phi0(const QubitParams& p, double tau) {
  require_resonant(p);
  if (!(tau > 0.0)) throw InvalidArgument("f1_phi0: tau must be positive");
  const double w2 = 2.0 * p.omega * p.omega;
  return p.efficiency * w2 * p.gamma * std::exp(-0.5 * p.gamma * tau) / (w2 + p.gamma * p.gamma);
}

double i1_closed(const QubitParams& p) {
  require_resonant(p);
  const double g = p.gamma;
  const double w2 = 2.0 * p.omega * p.omega;
  const double s = std::sin(p.phase);
  return 4.0 * p.efficiency * g * g * g * std::pow(w2 - g * g, 2) * s * s / std::pow(w2 + g * g, 4);
}

double i2_limits(const QubitParams& p, Regime regime) {
  require_resonant(p);
  const double g = p.gamma;
  const double w = p.omega;
  const double eta2 = p.efficiency * p.efficiency;
  const bool quadrature = std::abs(std::abs(std::sin(p.phase)) - 1.0) < 1e-9;
  switch (regime) {
    case Regime::kWeak:
      if (!quadrature || std::abs(w) > 0.1 * g) {
        spdlog::warn("i2_limits: weak-driving form used at Omega = {}, Phi = {}", w, p.phase);
      }
      return eta2 * 16.0 * w * w / (g * g * g);
    case Regime::kStrong: {
      if (!quadrature || std::abs(w) < 10.0 * g) {
        spdlog::warn("i2_limits: strong-driving form used at Omega = {}, Phi = {}", w, p.phase);
      }
      const double g2 = g * g;
      const double w2 = w * w;
      const double num = 256.0 * w2 * (243.0 * g2 * g2 + 216.0 * g2 * w2 + 128.0 * w2 * w2);
      return eta2 * num / (27.0 * g * std::pow(9.0 * g2 + 16.0 * w2, 3));
    }
    case Regime::kPhi0: {
      if (std::abs(std::sin(p.phase)) > 1e-9) {
        spdlog::warn("i2_limits: Phi = 0 form used at Phi = {}", p.phase);
      }
      const double w2 = 2.0 * w * w;
      return eta2 * 16.0 * w * w * std::pow(g, 5) / std::pow(w2 + g * g, 4);
    }
  }
  throw InvalidArgument("i2_limits: unknown regime");
}

double qfi_reference(double gamma, double duration) {
  if (!(gamma > 0.0)) throw InvalidArgument("qfi_reference: gamma must be positive");
  return 4.0 * duration / gamma;
}

}  // namespace homest::twolevel
