#pragma once

#include <span>
#include <vector>

namespace homest {

struct SpectrumOptions {
  /// Add the constant 1 contributed by the δ(τ) shot noise.
  bool include_shot_floor = false;
  /// |F(τ_max)| / |F(0⁺)| above this is reported as insufficient decay.
  double decay_tolerance = 1e-6;
};

struct Spectrum {
  std::vector<double> omega;
  std::vector<double> value;
  /// |F(τ_max)| / |F(0⁺)|; zero when F(0⁺) vanishes.
  double decay_ratio = 0.0;
  bool truncated = false;
};

/// S(ω) = ∫ F(τ) e^{−iωτ} dτ for a correlation sampled at τ_k = k·dtau (k ≥ 1).
///
/// F is extended evenly, F(−τ) = F(τ), which holds for a stationary signal, and the value at
/// τ = 0⁺ is extrapolated from the first four samples (or given explicitly). The transform is the
/// trapezoid-rule discrete Fourier sum
///   S(ω) = dtau·[F₀ + 2 Σ_k F_k cos(ω k dtau)],
/// real by construction and exactly even in ω. With this normalization
///   ∫ S dω / 2π = F(0⁺)  and  ∫_0^∞ F² dτ = (1/4π) ∫ S² dω.
Spectrum power_spectrum(std::span<const double> f1, double dtau, std::span<const double> omega,
                        const SpectrumOptions& options = {});
Spectrum power_spectrum(std::span<const double> f1, double f1_zero, double dtau, std::span<const double> omega,
                        const SpectrumOptions& options = {});

/// Natural DFT frequencies ω_j = 2πj/(m·dtau), j = −m/2 .. m/2 − 1.
std::vector<double> dft_frequencies(std::size_t m, double dtau);

/// Uniform grid of `points` values on [−omega_max, omega_max].
std::vector<double> symmetric_grid(double omega_max, std::size_t points);

/// Four-point polynomial extrapolation of samples at τ = dtau..4·dtau to τ = 0.
double extrapolate_to_zero(std::span<const double> f1);

}  // namespace homest
