#include "homest/spectrum.hpp"

#include <cmath>
#include <numbers>

#include <spdlog/spdlog.h>

#include "homest/error.hpp"

namespace homest {

double extrapolate_to_zero(std::span<const double> f1) {
  if (f1.size() < 4) throw InvalidArgument("extrapolate_to_zero: need at least four samples");
  // Lagrange weights of nodes 1, 2, 3, 4 evaluated at 0.
  return 4.0 * f1[0] - 6.0 * f1[1] + 4.0 * f1[2] - f1[3];
}

Spectrum power_spectrum(std::span<const double> f1, double dtau, std::span<const double> omega,
                        const SpectrumOptions& options) {
  return power_spectrum(f1, extrapolate_to_zero(f1), dtau, omega, options);
}

Spectrum power_spectrum(std::span<const double> f1, double f1_zero, double dtau, std::span<const double> omega,
                        const SpectrumOptions& options) {
  if (!(dtau > 0.0)) throw InvalidArgument("power_spectrum: dtau must be positive");
  if (f1.empty()) throw InvalidArgument("power_spectrum: empty correlation");

  Spectrum out;
  out.omega.assign(omega.begin(), omega.end());
  out.value.resize(omega.size());
  if (f1_zero != 0.0) out.decay_ratio = std::abs(f1.back()) / std::abs(f1_zero);
  out.truncated = out.decay_ratio > options.decay_tolerance;
  if (out.truncated) {
    spdlog::warn("power_spectrum: correlation has not decayed at tau_max (ratio {:.3e})", out.decay_ratio);
  }

  const double floor = options.include_shot_floor ? 1.0 : 0.0;
  for (std::size_t j = 0; j < omega.size(); ++j) {
    // cos(ω k dτ) by the Chebyshev recurrence c_{k+1} = 2 cos(ω dτ) c_k − c_{k−1}.
    const double base = std::cos(omega[j] * dtau);
    // Resynchronized every 256 terms to bound the accumulated rounding error.
    double c_prev = 1.0;
    double c = base;
    double acc = 0.0;
    for (std::size_t k = 0; k < f1.size(); ++k) {
      if (k % 256 == 255) {
        const double arg = omega[j] * dtau;
        c_prev = std::cos(arg * static_cast<double>(k));
        c = std::cos(arg * static_cast<double>(k + 1));
      }
      acc += f1[k] * c;
      const double c_next = 2.0 * base * c - c_prev;
      c_prev = c;
      c = c_next;
    }
    out.value[j] = dtau * (f1_zero + 2.0 * acc) + floor;
  }
  return out;
}

std::vector<double> dft_frequencies(std::size_t m, double dtau) {
  std::vector<double> w(m);
  const double step = 2.0 * std::numbers::pi / (static_cast<double>(m) * dtau);
  const auto half = static_cast<std::ptrdiff_t>(m / 2);
  for (std::size_t j = 0; j < m; ++j) w[j] = step * static_cast<double>(static_cast<std::ptrdiff_t>(j) - half);
  return w;
}

std::vector<double> symmetric_grid(double omega_max, std::size_t points) {
  if (points < 2) throw InvalidArgument("symmetric_grid: need at least two points");
  std::vector<double> w(points);
  for (std::size_t j = 0; j < points; ++j) {
    w[j] = -omega_max + 2.0 * omega_max * static_cast<double>(j) / static_cast<double>(points - 1);
  }
  // mirror so that w[j] == −w[n−1−j] bit for bit
  for (std::size_t j = 0; j < points / 2; ++j) w[points - 1 - j] = -w[j];
  if (points % 2 == 1) w[points / 2] = 0.0;
  return w;
}

}  // namespace homest
