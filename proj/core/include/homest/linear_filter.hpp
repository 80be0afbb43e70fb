#pragma once

#include "homest/correlations.hpp"

namespace homest {

/// Deterministic ingredients of the linear-filter estimator around θ₀ on a lag grid.
struct LinearFilterReference {
  double theta0 = 0.0;
  double mean_signal = 0.0;
  double d_mean_signal = 0.0;
  std::vector<double> tau;
  /// F⁽¹⁾(τ, θ₀) and ∂F⁽¹⁾/∂θ, mean-subtracted when built for mean-subtracted estimates.
  std::vector<double> f1;
  std::vector<double> d_f1;
  /// Per-time Fisher rates on the same lag grid.
  double i1_rate = 0.0;
  double i2_rate = 0.0;
  /// Zero-frequency spectrum S(0) = 1 + 2∫F_sub dτ, so that var(Y) ≈ S(0)/T.
  double s_zero = 1.0;
  bool mean_subtracted = true;
};

LinearFilterReference make_linear_filter_reference(const SystemModel& model, double theta0, const LagGrid& grid,
                                                   bool mean_subtract = true, double dtheta = kDefaultDTheta);

/// One-step estimator
///   θ̂ = θ₀ + [T/(I⁽¹⁾+I⁽²⁾)]·[∂I (Y − I(θ₀)) + ∫ dτ ∂F⁽¹⁾ (C(τ) − F⁽¹⁾(τ, θ₀))]
/// with the integral as a trapezoid on the lag grid of `c`. For a mean-subtracted C the reference
/// is F⁽¹⁾ − I² − S(0)/T, the expectation of C − Y² for a record of duration T.
/// Throws NumericalFailure when I⁽¹⁾ + I⁽²⁾ vanishes.
double linear_filter_estimate(double y, const CorrelationEstimate& c, const LinearFilterReference& ref);
double linear_filter_estimate(double y, const CorrelationEstimate& c, double theta0, const SystemModel& model,
                              double dtheta = kDefaultDTheta);

}  // namespace homest
