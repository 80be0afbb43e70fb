#include "homest/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "homest/error.hpp"
#include "homest/parallel.hpp"
#include "sme_kernel.hpp"

namespace homest {

ParameterGrid::ParameterGrid(std::vector<double> values)
    : ParameterGrid(values, std::vector<double>(values.size(), 0.0)) {}

ParameterGrid::ParameterGrid(std::vector<double> values, std::vector<double> log_prior)
    : values_(std::move(values)), log_prior_(std::move(log_prior)) {
  if (values_.empty()) throw InvalidArgument("ParameterGrid: no candidates");
  if (log_prior_.size() != values_.size()) throw InvalidArgument("ParameterGrid: prior length mismatch");
  for (std::size_t i = 1; i < values_.size(); ++i) {
    if (!(values_[i] > values_[i - 1])) throw InvalidArgument("ParameterGrid: values must be strictly increasing");
  }
  const double peak = *std::max_element(log_prior_.begin(), log_prior_.end());
  if (!std::isfinite(peak)) throw InvalidArgument("ParameterGrid: prior is not normalizable");
  double total = 0.0;
  for (double lp : log_prior_) total += std::exp(lp - peak);
  const double log_norm = peak + std::log(total);
  for (double& lp : log_prior_) lp -= log_norm;
}

ParameterGrid ParameterGrid::uniform(double lo, double hi, std::size_t points) {
  if (points < 2 || !(hi > lo)) throw InvalidArgument("ParameterGrid::uniform: need hi > lo and two points");
  std::vector<double> values(points);
  for (std::size_t i = 0; i < points; ++i) {
    values[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return ParameterGrid(std::move(values));
}

namespace {

// Filter for one candidate θ in Hermitian-basis coordinates. The log-likelihood is
// log_norm + log(ratio) + log(trace).
struct FilterCandidate {
  // Linear scheme: I + L dt, √η 𝓧 and √η Tr[𝓧 ·].
  std::vector<double> step;
  std::vector<double> kick;
  std::vector<double> trace_kick;
  std::optional<detail::KrausPolynomial> kraus;
  int dim = 0;
  std::vector<double> v;
  double trace = 1.0;
  double ratio = 1.0;
  double log_norm = 0.0;
};

FilterCandidate make_candidate(const SystemModel& model, double theta, double dt, const FilterOptions& options) {
  const detail::SmeOperators op(model, theta);
  FilterCandidate c;
  c.dim = model.dim();
  if (options.scheme == SmeScheme::kKraus) {
    c.kraus.emplace(model, theta, dt);
  } else {
    c.step = op.liouvillian;
    for (double& e : c.step) e *= dt;
    for (int k = 0; k < op.n; ++k) c.step[static_cast<std::size_t>(k * op.n + k)] += 1.0;
    c.kick = op.measurement;
    for (double& e : c.kick) e *= op.sqrt_eta;
    c.trace_kick = op.trace_x;
    for (double& e : c.trace_kick) e *= op.sqrt_eta;
  }

  DensityMatrix rho0 = DensityMatrix::Zero(model.dim(), model.dim());
  if (options.initial == InitialState::kSteadyState) {
    rho0 = model.steady_state(theta);
  } else {
    rho0(0, 0) = 1.0;
  }
  const Eigen::VectorXd coords = op.basis.coordinates(rho0);
  c.v.assign(coords.data(), coords.data() + coords.size());
  return c;
}

void fold(FilterCandidate& c, std::size_t i) {
  if (!(c.trace > 0.0) || !(c.ratio > 0.0) || !std::isfinite(c.trace) || !std::isfinite(c.ratio)) {
    throw NumericalFailure("loglik: non-positive filter weight at step " + std::to_string(i));
  }
  c.log_norm += std::log(c.trace) + std::log(c.ratio);
  for (double& e : c.v) e /= c.trace;
  c.trace = 1.0;
  c.ratio = 1.0;
}

template <int N>
void advance_linear(FilterCandidate& c, std::span<const double> dy, std::size_t first, std::size_t last,
                    std::size_t renormalize_every) {
  const int n = static_cast<int>(c.v.size());
  const int size = N > 0 ? N : n;
  std::vector<double> a(size), b(size);
  for (std::size_t i = first; i < last; ++i) {
    const double d = dy[i];
    // Tr 𝓛 = 0, so only the measurement term changes the trace.
    c.trace += d * detail::dot<N>(c.trace_kick.data(), c.v.data(), n);
    detail::matvec<N>(c.step.data(), c.v.data(), a.data(), n);
    detail::matvec<N>(c.kick.data(), c.v.data(), b.data(), n);
    for (int k = 0; k < size; ++k) c.v[k] = a[k] + d * b[k];
    if ((i + 1) % renormalize_every == 0) fold(c, i);
  }
}

template <int N>
void advance_kraus(FilterCandidate& c, std::span<const double> dy, std::size_t first, std::size_t last,
                   std::size_t renormalize_every) {
  const detail::KrausPolynomial& k = *c.kraus;
  const int n = k.n;
  const int size = N > 0 ? N : n;
  std::vector<double> out(size), scratch(size);
  for (std::size_t i = first; i < last; ++i) {
    // The state is kept at unit trace; the likelihood factor Tr[Pρ]/Tr[P̄ρ] accumulates in ratio.
    detail::matvec<N>(k.mean.data(), c.v.data(), scratch.data(), n);
    const double den = detail::coords_trace(scratch.data(), c.dim);
    detail::kraus_apply<N>(k, c.v.data(), dy[i], out.data(), scratch.data());
    const double num = detail::coords_trace(out.data(), c.dim);
    c.ratio *= num / den;
    const double inv = 1.0 / num;
    for (int j = 0; j < size; ++j) c.v[j] = out[j] * inv;
    if ((i + 1) % renormalize_every == 0) fold(c, i);
  }
}

void advance(FilterCandidate& c, std::span<const double> dy, std::size_t first, std::size_t last,
             std::size_t renormalize_every) {
  const bool small = c.v.size() == 4;
  if (c.kraus) {
    small ? advance_kraus<4>(c, dy, first, last, renormalize_every)
          : advance_kraus<0>(c, dy, first, last, renormalize_every);
  } else {
    small ? advance_linear<4>(c, dy, first, last, renormalize_every)
          : advance_linear<0>(c, dy, first, last, renormalize_every);
  }
}

double current_loglik(const FilterCandidate& c) {
  if (!(c.trace > 0.0) || !(c.ratio > 0.0)) throw NumericalFailure("loglik: non-positive filter weight");
  const double value = c.log_norm + std::log(c.trace) + std::log(c.ratio);
  if (!std::isfinite(value)) throw NumericalFailure("loglik: non-finite accumulation");
  return value;
}

}  // namespace

std::vector<std::vector<double>> loglik_bank(const MeasurementRecord& record, const SystemModel& model,
                                             std::span<const double> thetas, std::span<const std::size_t> checkpoint_steps,
                                             const FilterOptions& options) {
  if (options.renormalize_every == 0) throw InvalidArgument("loglik: renormalize_every must be positive");
  if (!(record.dt > 0.0)) throw InvalidArgument("loglik: record dt must be positive");
  for (std::size_t s : checkpoint_steps) {
    if (s > record.n_steps()) throw InvalidArgument("loglik: checkpoint beyond the end of the record");
  }
  std::vector<std::size_t> order(checkpoint_steps.begin(), checkpoint_steps.end());
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());

  std::vector<std::vector<double>> out(checkpoint_steps.size(), std::vector<double>(thetas.size()));
  const std::span<const double> dy(record.dy);

  parallel_for(thetas.size(), options.workers, [&](std::size_t c) {
    FilterCandidate cand = make_candidate(model, thetas[c], record.dt, options);
    std::size_t pos = 0;
    std::vector<double> at_step(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
      advance(cand, dy, pos, order[k], options.renormalize_every);
      pos = order[k];
      at_step[k] = current_loglik(cand);
    }
    for (std::size_t r = 0; r < checkpoint_steps.size(); ++r) {
      const auto it = std::lower_bound(order.begin(), order.end(), checkpoint_steps[r]);
      out[r][c] = at_step[static_cast<std::size_t>(it - order.begin())];
    }
  });
  return out;
}

double loglik(const MeasurementRecord& record, const SystemModel& model, double theta, const FilterOptions& options) {
  const double thetas[] = {theta};
  const std::size_t steps[] = {record.n_steps()};
  FilterOptions serial = options;
  serial.workers = 1;
  return loglik_bank(record, model, thetas, steps, serial)[0][0];
}

PosteriorSummary summarize_posterior(std::span<const double> thetas, std::span<const double> p) {
  if (thetas.size() != p.size() || p.empty()) throw InvalidArgument("summarize_posterior: size mismatch");
  PosteriorSummary s;
  const auto imax = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
  s.map = thetas[imax];

  const double half = 0.5 * p[imax];
  double left = thetas.front();
  for (std::size_t j = imax; j-- > 0;) {
    if (p[j] < half) {
      left = thetas[j] + (half - p[j]) / (p[j + 1] - p[j]) * (thetas[j + 1] - thetas[j]);
      break;
    }
  }
  double right = thetas.back();
  for (std::size_t j = imax + 1; j < p.size(); ++j) {
    if (p[j] < half) {
      right = thetas[j - 1] + (p[j - 1] - half) / (p[j - 1] - p[j]) * (thetas[j] - thetas[j - 1]);
      break;
    }
  }
  s.fwhm = right - left;

  double mean = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) mean += p[j] * thetas[j];
  double var = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) var += p[j] * (thetas[j] - mean) * (thetas[j] - mean);
  s.mean = mean;
  s.stddev = std::sqrt(var);
  return s;
}

std::vector<double> PosteriorTrace::posterior(std::size_t checkpoint) const {
  std::vector<double> p(log_posterior.at(checkpoint).size());
  std::transform(log_posterior[checkpoint].begin(), log_posterior[checkpoint].end(), p.begin(),
                 [](double lp) { return std::exp(lp); });
  return p;
}

PosteriorTrace bayes_posterior(const MeasurementRecord& record, const SystemModel& model, const ParameterGrid& grid,
                               std::span<const double> checkpoints, const FilterOptions& options) {
  std::vector<std::size_t> steps;
  steps.reserve(checkpoints.size());
  for (double t : checkpoints) {
    if (!(t >= 0.0) || t > record.duration() + 0.5 * record.dt) {
      throw InvalidArgument("bayes_posterior: checkpoint outside the record duration");
    }
    steps.push_back(static_cast<std::size_t>(std::llround(t / record.dt)));
  }

  const auto ll = loglik_bank(record, model, grid.values(), steps, options);

  PosteriorTrace trace;
  trace.times.assign(checkpoints.begin(), checkpoints.end());
  trace.thetas.assign(grid.values().begin(), grid.values().end());
  for (const auto& row : ll) {
    std::vector<double> lp(row.size());
    for (std::size_t c = 0; c < row.size(); ++c) lp[c] = row[c] + grid.log_prior()[c];
    const double peak = *std::max_element(lp.begin(), lp.end());
    if (!std::isfinite(peak)) throw NumericalFailure("bayes_posterior: every log-weight is -inf");
    double total = 0.0;
    for (double v : lp) total += std::exp(v - peak);
    const double log_norm = peak + std::log(total);
    for (double& v : lp) v -= log_norm;
    trace.log_posterior.push_back(std::move(lp));

    const std::vector<double> p = trace.posterior(trace.log_posterior.size() - 1);
    const PosteriorSummary s = summarize_posterior(trace.thetas, p);
    trace.map.push_back(s.map);
    trace.fwhm.push_back(s.fwhm);
    trace.mean.push_back(s.mean);
    trace.stddev.push_back(s.stddev);
  }
  return trace;
}

}  // namespace homest
