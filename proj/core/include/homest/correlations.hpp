#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "homest/model.hpp"
#include "homest/spectrum.hpp"
#include "homest/trajectory.hpp"

namespace homest {

/// Y = Σ dy / T. Throws InvalidArgument for an empty record.
double integrated_signal(const MeasurementRecord& record);

/// Lag-grid settings. The record is binned at dtau (an integer multiple m of the record dt):
/// J_k = (Σ_{i in bin k} dy_i)/dtau, and C_l = (1/(N−l)) Σ_k J_k J_{k+l} for l = 1..lags.
struct LagGrid {
  double dtau = 0.05;
  std::size_t lags = 40;
};

/// Reduced statistics of one record: Y and C_1..C_L (C_l − Y² when mean-subtracted).
struct CorrelationSample {
  double y = 0.0;
  std::vector<double> c;
};

CorrelationSample record_correlation(const MeasurementRecord& record, const LagGrid& grid, bool mean_subtract);

/// Ensemble estimate of C(τ_l), τ_l = l·dtau, l ≥ 1 (lag 0 is never present).
struct CorrelationEstimate {
  std::vector<double> tau;
  std::vector<double> mean;
  std::vector<double> stderr_;
  std::size_t n_records = 0;
  double dtau = 0.0;
  bool mean_subtracted = false;
  /// Mean integrated signal across the records.
  double y_mean = 0.0;
  /// Duration of the records.
  double duration = 0.0;
};

CorrelationEstimate aggregate_correlations(std::span<const CorrelationSample> samples, const LagGrid& grid,
                                           bool mean_subtract, double duration);

/// C_l averaged over records with per-lag standard errors. Throws InvalidArgument when dtau is not
/// a multiple of dt or L·dtau ≥ T/2.
CorrelationEstimate empirical_correlation(std::span<const MeasurementRecord> records, const LagGrid& grid,
                                          bool mean_subtract);

/// Components X = (Y, C_1..C_L) and their covariance Σ.
struct GaussianStatVector {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  std::size_t n_samples = 0;

  /// Standard error of the sample covariance element (i, j): √((Σ_ii Σ_jj + Σ_ij²)/(n − 1)).
  double covariance_stderr(Eigen::Index i, Eigen::Index j) const;
};

/// Sample covariance across records of (Y, C_1 − Y², …, C_L − Y²). Throws InvalidArgument for
/// fewer than two samples.
GaussianStatVector empirical_covariance(std::span<const CorrelationSample> mean_subtracted_samples);
GaussianStatVector empirical_covariance(std::span<const MeasurementRecord> records, const LagGrid& grid);

/// I⁽¹⁾/T = (∂I/∂θ)² by central difference.
double fisher_mean_signal(const SystemModel& model, double theta, double dtheta = kDefaultDTheta);

struct TwoTimeOptions {
  double dtheta = kDefaultDTheta;
  double dtau = 1e-3;
  double tau_max = 40.0;
  /// Required |F(τ_max)| / |F(0⁺)| of the mean-subtracted correlation.
  double decay_tolerance = 1e-6;
};

/// I⁽²⁾/T = ∫_{0⁺}^{τ_max} (∂F⁽¹⁾/∂θ)² dτ using the mean-subtracted F⁽¹⁾, central difference in
/// θ and trapezoid in τ. Throws NumericalFailure when F has not decayed at τ_max.
double fisher_two_time(const SystemModel& model, double theta, const TwoTimeOptions& options = {});

/// ∂F⁽¹⁾/∂θ (mean-subtracted) on τ_k = k·dtau, k = 1..count.
std::vector<double> qrt_derivative(const SystemModel& model, double theta, double dtau, std::size_t count,
                                   double dtheta = kDefaultDTheta);

struct SpectralOptions {
  double dtheta = kDefaultDTheta;
  double dtau = 2e-3;
  double tau_max = 40.0;
  double decay_tolerance = 1e-6;
  /// |∂S/∂θ| at the grid edge relative to its maximum must stay below this.
  double tail_tolerance = 1e-3;
};

/// I⁽²⁾/T from the spectrum of the mean-subtracted F⁽¹⁾: (1/4π) ∫ (∂S/∂θ)² dω over omega_grid
/// (trapezoid). The 1/4π fixes the Fourier normalization of power_spectrum so that this equals
/// fisher_two_time (Plancherel with the even extension). Throws NumericalFailure when the grid
/// truncates the support of ∂S/∂θ.
double fisher_spectral(const SystemModel& model, double theta, std::span<const double> omega_grid,
                       const SpectralOptions& options = {});

}  // namespace homest
