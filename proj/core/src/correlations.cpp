#include "homest/correlations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "homest/error.hpp"
#include "homest/parallel.hpp"
#include "homest/regression.hpp"

namespace homest {

namespace {

std::size_t bin_width(double dtau, double dt) {
  if (!(dtau > 0.0) || !(dt > 0.0)) throw InvalidArgument("correlation: dtau and dt must be positive");
  const double ratio = dtau / dt;
  const auto m = static_cast<std::size_t>(std::llround(ratio));
  if (m == 0 || std::abs(ratio - static_cast<double>(m)) > 1e-9 * ratio) {
    throw InvalidArgument("correlation: dtau must be an integer multiple of the record dt");
  }
  return m;
}

double mean_of(std::span<const double> v) { return pairwise_sum(v) / static_cast<double>(v.size()); }

}  // namespace

double integrated_signal(const MeasurementRecord& record) {
  if (record.dy.empty()) throw InvalidArgument("integrated_signal: empty record");
  return pairwise_sum(record.dy) / record.duration();
}

CorrelationSample record_correlation(const MeasurementRecord& record, const LagGrid& grid, bool mean_subtract) {
  const std::size_t m = bin_width(grid.dtau, record.dt);
  const std::size_t n_bins = record.n_steps() / m;
  if (grid.lags == 0) throw InvalidArgument("correlation: need at least one lag");
  if (2.0 * static_cast<double>(grid.lags) * grid.dtau >= record.duration()) {
    throw InvalidArgument("correlation: lags * dtau must stay below T/2");
  }

  std::vector<double> j(n_bins);
  for (std::size_t k = 0; k < n_bins; ++k) {
    double acc = 0.0;
    for (std::size_t i = k * m; i < (k + 1) * m; ++i) acc += record.dy[i];
    j[k] = acc / grid.dtau;
  }

  CorrelationSample s;
  s.y = integrated_signal(record);
  s.c.resize(grid.lags);
  for (std::size_t l = 1; l <= grid.lags; ++l) {
    double acc = 0.0;
    for (std::size_t k = 0; k + l < n_bins; ++k) acc += j[k] * j[k + l];
    s.c[l - 1] = acc / static_cast<double>(n_bins - l);
    if (mean_subtract) s.c[l - 1] -= s.y * s.y;
  }
  return s;
}

CorrelationEstimate aggregate_correlations(std::span<const CorrelationSample> samples, const LagGrid& grid,
                                           bool mean_subtract, double duration) {
  if (samples.empty()) throw InvalidArgument("correlation: no records");
  const std::size_t n = samples.size();
  CorrelationEstimate e;
  e.n_records = n;
  e.dtau = grid.dtau;
  e.mean_subtracted = mean_subtract;
  e.duration = duration;

  std::vector<double> column(n);
  for (std::size_t k = 0; k < n; ++k) column[k] = samples[k].y;
  e.y_mean = mean_of(column);

  for (std::size_t l = 0; l < grid.lags; ++l) {
    for (std::size_t k = 0; k < n; ++k) {
      if (samples[k].c.size() != grid.lags) throw InvalidArgument("correlation: sample has the wrong lag count");
      column[k] = samples[k].c[l];
    }
    const double mean = mean_of(column);
    double var = 0.0;
    for (double v : column) var += (v - mean) * (v - mean);
    e.tau.push_back(static_cast<double>(l + 1) * grid.dtau);
    e.mean.push_back(mean);
    e.stderr_.push_back(n > 1 ? std::sqrt(var / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0);
  }
  return e;
}

CorrelationEstimate empirical_correlation(std::span<const MeasurementRecord> records, const LagGrid& grid,
                                          bool mean_subtract) {
  if (records.empty()) throw InvalidArgument("correlation: no records");
  const auto samples = parallel_map<CorrelationSample>(
      records.size(), 0, [&](std::size_t k) { return record_correlation(records[k], grid, mean_subtract); });
  return aggregate_correlations(samples, grid, mean_subtract, records.front().duration());
}

double GaussianStatVector::covariance_stderr(Eigen::Index i, Eigen::Index j) const {
  const double n = static_cast<double>(n_samples);
  return std::sqrt((covariance(i, i) * covariance(j, j) + covariance(i, j) * covariance(i, j)) / (n - 1.0));
}

GaussianStatVector empirical_covariance(std::span<const CorrelationSample> samples) {
  if (samples.size() < 2) throw InvalidArgument("empirical_covariance: need at least two records");
  const auto dim = static_cast<Eigen::Index>(samples.front().c.size() + 1);
  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd x(n, dim);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& s = samples[static_cast<std::size_t>(k)];
    if (static_cast<Eigen::Index>(s.c.size()) + 1 != dim) throw InvalidArgument("empirical_covariance: ragged samples");
    x(k, 0) = s.y;
    for (Eigen::Index l = 1; l < dim; ++l) x(k, l) = s.c[static_cast<std::size_t>(l - 1)];
  }
  GaussianStatVector g;
  g.n_samples = samples.size();
  g.mean = x.colwise().mean().transpose();
  const Eigen::MatrixXd centered = x.rowwise() - g.mean.transpose();
  g.covariance = (centered.transpose() * centered) / static_cast<double>(n - 1);
  return g;
}

GaussianStatVector empirical_covariance(std::span<const MeasurementRecord> records, const LagGrid& grid) {
  if (records.size() < 2) throw InvalidArgument("empirical_covariance: need at least two records");
  const auto samples = parallel_map<CorrelationSample>(
      records.size(), 0, [&](std::size_t k) { return record_correlation(records[k], grid, true); });
  return empirical_covariance(samples);
}

double fisher_mean_signal(const SystemModel& model, double theta, double dtheta) {
  if (!(dtheta > 0.0)) throw InvalidArgument("fisher_mean_signal: dtheta must be positive");
  const double d = (mean_signal(model, theta + dtheta) - mean_signal(model, theta - dtheta)) / (2.0 * dtheta);
  return d * d;
}

std::vector<double> qrt_derivative(const SystemModel& model, double theta, double dtau, std::size_t count,
                                   double dtheta) {
  if (!(dtheta > 0.0)) throw InvalidArgument("qrt_derivative: dtheta must be positive");
  const auto up = qrt_uniform(model, theta + dtheta, dtau, count, true);
  const auto down = qrt_uniform(model, theta - dtheta, dtau, count, true);
  std::vector<double> d(count);
  for (std::size_t k = 0; k < count; ++k) d[k] = (up[k] - down[k]) / (2.0 * dtheta);
  return d;
}

namespace {

std::size_t lag_count(double dtau, double tau_max) {
  if (!(dtau > 0.0) || !(tau_max > 4.0 * dtau)) throw InvalidArgument("fisher: need dtau > 0 and tau_max > 4 dtau");
  return static_cast<std::size_t>(std::llround(tau_max / dtau));
}

void check_decay(const SystemModel& model, double theta, double dtau, std::size_t count, double tolerance) {
  const double f0 = qrt_zero_limit(model, theta, true);
  if (std::abs(f0) < 1e-14) return;  // no correlated signal at all (e.g. Ω = 0)
  const double tail = qrt_uniform(model, theta, dtau, count, true).back();
  const double ratio = std::abs(tail) / std::abs(f0);
  if (ratio > tolerance) {
    throw NumericalFailure("fisher: mean-subtracted correlation has not decayed at tau_max (ratio " +
                           std::to_string(ratio) + "); increase tau_max");
  }
}

}  // namespace

double fisher_two_time(const SystemModel& model, double theta, const TwoTimeOptions& o) {
  const std::size_t count = lag_count(o.dtau, o.tau_max);
  check_decay(model, theta, o.dtau, count, o.decay_tolerance);
  const auto d = qrt_derivative(model, theta, o.dtau, count, o.dtheta);
  // the first panel uses the τ → 0⁺ limit; dropping it costs a bias linear in dtau
  const double d0 = (qrt_zero_limit(model, theta + o.dtheta, true) - qrt_zero_limit(model, theta - o.dtheta, true)) /
                    (2.0 * o.dtheta);
  double acc = 0.5 * d0 * d0;
  for (double v : d) acc += v * v;
  acc -= 0.5 * d.back() * d.back();
  return o.dtau * acc;
}

double fisher_spectral(const SystemModel& model, double theta, std::span<const double> omega_grid,
                       const SpectralOptions& o) {
  if (omega_grid.size() < 3) throw InvalidArgument("fisher_spectral: omega grid needs at least three points");
  for (std::size_t j = 1; j < omega_grid.size(); ++j) {
    if (!(omega_grid[j] > omega_grid[j - 1])) throw InvalidArgument("fisher_spectral: omega grid must increase");
  }
  const std::size_t count = lag_count(o.dtau, o.tau_max);
  check_decay(model, theta, o.dtau, count, o.decay_tolerance);
  const auto d = qrt_derivative(model, theta, o.dtau, count, o.dtheta);
  const double d0 = (qrt_zero_limit(model, theta + o.dtheta, true) - qrt_zero_limit(model, theta - o.dtheta, true)) /
                    (2.0 * o.dtheta);

  SpectrumOptions so;
  so.decay_tolerance = std::numeric_limits<double>::infinity();  // decay already checked on F itself
  const Spectrum ds = power_spectrum(d, d0, o.dtau, omega_grid, so);

  double peak = 0.0;
  for (double v : ds.value) peak = std::max(peak, std::abs(v));
  const double edge = std::max(std::abs(ds.value.front()), std::abs(ds.value.back()));
  // A derivative at rounding level (e.g. no drive) has no support to truncate.
  if (peak > 1e-12 && edge > o.tail_tolerance * peak) {
    throw NumericalFailure("fisher_spectral: omega grid truncates dS/dtheta (edge/peak " + std::to_string(edge / peak) +
                           ")");
  }

  double acc = 0.0;
  for (std::size_t j = 1; j < omega_grid.size(); ++j) {
    const double a = ds.value[j - 1];
    const double b = ds.value[j];
    acc += 0.5 * (a * a + b * b) * (omega_grid[j] - omega_grid[j - 1]);
  }
  return acc / (4.0 * std::numbers::pi);
}

}  // namespace homest
