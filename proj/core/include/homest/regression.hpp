#pragma once

#include <span>
#include <vector>

#include "homest/model.hpp"

namespace homest {

/// Expected homodyne current I(θ) = √η Tr[𝓧_Φ ρ_st], in units of √γ.
double mean_signal(const SystemModel& model, double theta);

/// Smooth part of the two-time correlation F⁽¹⁾(τ) = η Tr[𝓧_Φ e^{Lτ} 𝓧_Φ ρ_st] on τ > 0.
/// The shot-noise term δ(τ) is never represented. With mean_subtract the constant I² is removed.
/// Throws InvalidArgument for τ ≤ 0 or a non-increasing grid.
std::vector<double> qrt_two_time(const SystemModel& model, double theta, std::span<const double> taus,
                                 bool mean_subtract = false);

/// F⁽¹⁾ on the uniform grid τ_k = k·dtau, k = 1..count, by repeated application of e^{L·dtau}.
/// Same values as qrt_two_time on that grid; linear cost in count.
std::vector<double> qrt_uniform(const SystemModel& model, double theta, double dtau, std::size_t count,
                                bool mean_subtract = false);

/// Limit τ → 0⁺ of the smooth part, η Tr[𝓧_Φ 𝓧_Φ ρ_st] (minus I² when mean_subtract).
double qrt_zero_limit(const SystemModel& model, double theta, bool mean_subtract = false);

/// Multi-time correlator of an even number n of currents,
/// F⁽ⁿᐟ²⁾ = η^{n/2} Tr[𝓧 e^{Lτ_{n−1}} ⋯ 𝓧 e^{Lτ_1} 𝓧 ρ_st], with n − 1 positive lags
/// (τ_1 is the earliest interval).
double multi_time(const SystemModel& model, double theta, std::span<const double> lags, int n);

}  // namespace homest
