#pragma once

#include <array>

namespace homest::twolevel {

/// Resonantly driven, radiatively damped qubit. Rates in units of γ.
/// The closed forms below require detuning == 0 and reject anything else.
struct QubitParams {
  double omega = 1.0;
  double gamma = 1.0;
  double phase = 0.0;
  double efficiency = 1.0;
  double detuning = 0.0;
};

/// (s_x, s_y, s_z) = (0, 2Ωγ/(γ²+2Ω²), −γ²/(γ²+2Ω²)).
std::array<double, 3> steady_bloch(const QubitParams& p);

/// Mean homodyne current √η·√γ⟨σ_Φ⟩_st = −√(ηγ) sin Φ · s_y.
double mean_current(const QubitParams& p);

/// F⁽¹⁾ at Φ = 0: η·2Ω²γ e^{−γτ/2}/(2Ω²+γ²), τ > 0.
double f1_phi0(const QubitParams& p, double tau);

/// I⁽¹⁾/T = 4ηγ³ (2Ω²−γ²)² sin²Φ / (2Ω²+γ²)⁴, the square of ∂mean_current/∂Ω.
/// Limits: 4/γ at Ω = 0 and zero at Ω = γ/√2.
double i1_closed(const QubitParams& p);

enum class Regime { kWeak, kStrong, kPhi0 };

/// Closed-form I⁽²⁾/T:
///   kWeak   (Φ = π/2, Ω ≲ 0.1γ):  16η²Ω²/γ³
///   kStrong (Φ = π/2, Ω ≳ 10γ):   η²·256Ω²(243γ⁴+216γ²Ω²+128Ω⁴) / (27γ(9γ²+16Ω²)³) → 8/(27γ)
///   kPhi0   (Φ = 0, any Ω):       η²·16Ω²γ⁵/(2Ω²+γ²)⁴
/// kPhi0 is integrated from the Φ = 0 correlation above.
/// Logs a warning when Ω or Φ is outside the regime.
double i2_limits(const QubitParams& p, Regime regime);

/// Quantum Fisher information of the Rabi frequency, 4T/γ, independent of Ω.
double qfi_reference(double gamma, double duration);

}  // namespace homest::twolevel
