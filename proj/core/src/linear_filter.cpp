#include "homest/linear_filter.hpp"

#include <cmath>

#include "homest/error.hpp"
#include "homest/regression.hpp"

namespace homest {

namespace {

// Trapezoid on a uniform grid.
double trapezoid(const std::vector<double>& f, double h) {
  if (f.size() < 2) return 0.0;
  double acc = 0.0;
  for (double v : f) acc += v;
  return h * (acc - 0.5 * (f.front() + f.back()));
}

}  // namespace

LinearFilterReference make_linear_filter_reference(const SystemModel& model, double theta0, const LagGrid& grid,
                                                   bool mean_subtract, double dtheta) {
  if (!(dtheta > 0.0)) throw InvalidArgument("linear filter: dtheta must be positive");
  if (grid.lags < 2 || !(grid.dtau > 0.0)) throw InvalidArgument("linear filter: need dtau > 0 and two lags");

  LinearFilterReference r;
  r.theta0 = theta0;
  r.mean_subtracted = mean_subtract;
  r.mean_signal = mean_signal(model, theta0);
  r.d_mean_signal = (mean_signal(model, theta0 + dtheta) - mean_signal(model, theta0 - dtheta)) / (2.0 * dtheta);
  r.f1 = qrt_uniform(model, theta0, grid.dtau, grid.lags, mean_subtract);
  const auto up = qrt_uniform(model, theta0 + dtheta, grid.dtau, grid.lags, mean_subtract);
  const auto down = qrt_uniform(model, theta0 - dtheta, grid.dtau, grid.lags, mean_subtract);
  r.d_f1.resize(grid.lags);
  r.tau.resize(grid.lags);
  for (std::size_t l = 0; l < grid.lags; ++l) {
    r.tau[l] = static_cast<double>(l + 1) * grid.dtau;
    r.d_f1[l] = (up[l] - down[l]) / (2.0 * dtheta);
  }
  r.i1_rate = r.d_mean_signal * r.d_mean_signal;
  std::vector<double> sq(grid.lags);
  for (std::size_t l = 0; l < grid.lags; ++l) sq[l] = r.d_f1[l] * r.d_f1[l];
  r.i2_rate = trapezoid(sq, grid.dtau);

  // S(0) = 1 + 2∫₀^∞ F_sub dτ on a fine grid long enough for the correlation to decay.
  const double fine = 1e-3;
  const auto f_sub = qrt_uniform(model, theta0, fine, 40000, true);
  double integral = 0.5 * fine * qrt_zero_limit(model, theta0, true);
  integral += trapezoid(f_sub, fine) + 0.5 * fine * f_sub.front();
  r.s_zero = 1.0 + 2.0 * integral;
  return r;
}

double linear_filter_estimate(double y, const CorrelationEstimate& c, const LinearFilterReference& ref) {
  if (c.mean.size() != ref.tau.size()) throw InvalidArgument("linear filter: lag grid does not match the reference");
  for (std::size_t l = 0; l < ref.tau.size(); ++l) {
    if (std::abs(c.tau[l] - ref.tau[l]) > 1e-9 * ref.tau[l]) {
      throw InvalidArgument("linear filter: lag grid does not match the reference");
    }
  }
  if (c.mean_subtracted != ref.mean_subtracted) {
    throw InvalidArgument("linear filter: mean subtraction differs from the reference");
  }
  const double info = ref.i1_rate + ref.i2_rate;
  if (!(info > 0.0) || !std::isfinite(info)) throw NumericalFailure("linear filter: vanishing Fisher information at theta0");

  // E[C − Y²] = F_sub − var(Y) for a record of finite duration.
  const double offset = (ref.mean_subtracted && c.duration > 0.0 && std::isfinite(c.duration))
                            ? ref.s_zero / c.duration
                            : 0.0;
  std::vector<double> weighted(ref.tau.size());
  for (std::size_t l = 0; l < ref.tau.size(); ++l) weighted[l] = ref.d_f1[l] * (c.mean[l] - ref.f1[l] + offset);
  const double innovation = ref.d_mean_signal * (y - ref.mean_signal) + trapezoid(weighted, c.dtau);
  return ref.theta0 + innovation / info;
}

double linear_filter_estimate(double y, const CorrelationEstimate& c, double theta0, const SystemModel& model,
                              double dtheta) {
  const LagGrid grid{c.dtau, c.mean.size()};
  return linear_filter_estimate(y, c, make_linear_filter_reference(model, theta0, grid, c.mean_subtracted, dtheta));
}

}  // namespace homest
