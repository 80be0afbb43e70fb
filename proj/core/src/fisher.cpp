#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "homest/error.hpp"
#include "homest/inference.hpp"
#include "homest/parallel.hpp"
#include "homest/rng.hpp"
#include "sme_kernel.hpp"

namespace homest {

namespace {

struct ScoreOperators {
  detail::SmeOperators sme;
  std::vector<double> d_liouvillian;
  std::vector<double> d_measurement;
  bool measurement_depends_on_theta = false;

  ScoreOperators(const SystemModel& model, double theta, double dtheta)
      : sme(model, theta),
        d_liouvillian(detail::to_row_major(sme.basis.real_matrix(model.liouvillian_derivative(theta, dtheta)))) {
    const Eigen::MatrixXd dx = sme.basis.real_matrix(model.measurement_derivative(theta, dtheta));
    measurement_depends_on_theta = dx.cwiseAbs().maxCoeff() > 0.0;
    d_measurement = detail::to_row_major(dx);
  }
};

// ∂P_k/∂θ of the Kraus polynomial by central difference.
detail::KrausPolynomial kraus_derivative(const SystemModel& model, double theta, double dt, double dtheta) {
  detail::KrausPolynomial up(model, theta + dtheta, dt);
  const detail::KrausPolynomial down(model, theta - dtheta, dt);
  for (std::size_t k = 0; k < up.p.size(); ++k) {
    for (std::size_t j = 0; j < up.p[k].size(); ++j) up.p[k][j] = (up.p[k][j] - down.p[k][j]) / (2.0 * dtheta);
  }
  for (std::size_t j = 0; j < up.mean.size(); ++j) up.mean[j] = (up.mean[j] - down.mean[j]) / (2.0 * dtheta);
  return up;
}

struct KrausPair {
  detail::KrausPolynomial step;
  detail::KrausPolynomial derivative;
};

std::vector<std::size_t> checkpoint_steps(const FisherOptions& o, const std::vector<double>& times) {
  const auto n_steps = static_cast<std::size_t>(std::llround(o.duration / o.dt));
  std::vector<std::size_t> steps;
  for (double t : times) {
    if (!(t >= 0.0) || t > o.duration + 0.5 * o.dt) throw InvalidArgument("fisher_mc: checkpoint outside [0, T]");
    steps.push_back(std::min(n_steps, static_cast<std::size_t>(std::llround(t / o.dt))));
  }
  return steps;
}

struct PathResult {
  std::vector<double> score;
  std::vector<double> quadratic_variation;
};

// ζ for the Kraus scheme is carried as ∂ρ (traceless) plus the score Tr ζ, so that the score is
// the exact θ-derivative of the log-likelihood computed by loglik with the same scheme:
//   Σ_i log Tr[P(dy_i)ρ_i] − log Tr[P̄ρ_i].
template <int N>
PathResult score_path(const ScoreOperators& op, const KrausPair* kraus, double dt, std::size_t n_steps,
                      std::vector<double> v, std::vector<double> z, const std::vector<std::size_t>& steps,
                      RngSpec rng) {
  const auto& s = op.sme;
  const int n = s.n;
  const int size = N > 0 ? N : n;
  const int dim = s.basis.dim();
  const double sqrt_dt = std::sqrt(dt);
  const double eta = s.sqrt_eta * s.sqrt_eta;
  NormalStream noise(rng);

  std::vector<double> a(size), b(size), c(size), e(size), dxv(size, 0.0), scratch(size);
  PathResult out{std::vector<double>(steps.size()), std::vector<double>(steps.size())};
  double score = detail::coords_trace(z.data(), dim);
  double qv = 0.0;
  auto record = [&](std::size_t i) {
    if (!std::isfinite(score)) throw NumericalFailure("fisher_mc: non-finite score at step " + std::to_string(i));
    for (std::size_t k = 0; k < steps.size(); ++k) {
      if (steps[k] == i) {
        out.score[k] = score;
        out.quadratic_variation[k] = qv;
      }
    }
  };
  if (kraus != nullptr) {
    // z holds ∂ρ = ζ − Tr ζ ρ from here on.
    for (int k = 0; k < size; ++k) z[k] -= score * v[k];
  }
  record(0);

  for (std::size_t i = 0; i < n_steps; ++i) {
    // Same draw order and state update as simulate_homodyne, so ρ follows the simulated record.
    const double x = detail::dot<N>(s.trace_x.data(), v.data(), n);
    const double dw = sqrt_dt * noise.next();

    if (kraus != nullptr) {
      // Predictable quadratic variation of the score: η (∂_θ Tr[𝓧ρ])² dt.
      const double dx = detail::dot<N>(s.trace_x.data(), z.data(), n);
      qv += eta * dx * dx * dt;

      const double dy = s.sqrt_eta * x * dt + dw;
      const detail::KrausPolynomial& p = kraus->step;
      const detail::KrausPolynomial& dp = kraus->derivative;
      detail::kraus_apply<N>(p, v.data(), dy, a.data(), scratch.data());   // Pρ
      detail::kraus_apply<N>(p, z.data(), dy, b.data(), scratch.data());   // P∂ρ
      detail::kraus_apply<N>(dp, v.data(), dy, c.data(), scratch.data());  // ∂P ρ
      for (int k = 0; k < size; ++k) b[k] += c[k];
      const double num = detail::coords_trace(a.data(), dim);
      const double dnum = detail::coords_trace(b.data(), dim);

      detail::matvec<N>(p.mean.data(), v.data(), c.data(), n);
      const double den = detail::coords_trace(c.data(), dim);
      detail::matvec<N>(p.mean.data(), z.data(), c.data(), n);
      detail::matvec<N>(dp.mean.data(), v.data(), e.data(), n);
      const double dden = detail::coords_trace(c.data(), dim) + detail::coords_trace(e.data(), dim);

      score += dnum / num - dden / den;
      for (int k = 0; k < size; ++k) {
        v[k] = a[k] / num;
        z[k] = b[k] / num - v[k] * (dnum / num);
      }
    } else {
      const double tr_z = detail::coords_trace(z.data(), dim);
      const double dx = detail::dot<N>(s.trace_x.data(), z.data(), n) - x * tr_z;
      qv += eta * dx * dx * dt;

      const double kick = s.sqrt_eta * dw;
      detail::matvec<N>(s.liouvillian.data(), v.data(), a.data(), n);
      detail::matvec<N>(s.measurement.data(), v.data(), b.data(), n);
      detail::matvec<N>(s.liouvillian.data(), z.data(), c.data(), n);
      detail::matvec<N>(s.measurement.data(), z.data(), e.data(), n);
      detail::matvec<N>(op.d_liouvillian.data(), v.data(), scratch.data(), n);
      if (op.measurement_depends_on_theta) detail::matvec<N>(op.d_measurement.data(), v.data(), dxv.data(), n);
      for (int k = 0; k < size; ++k) {
        z[k] += dt * (c[k] + scratch[k]) + kick * (e[k] + dxv[k] - x * z[k]);
        v[k] += dt * a[k] + kick * (b[k] - x * v[k]);
      }
      score = detail::coords_trace(z.data(), dim);
    }

    if (s.basis.min_eigenvalue(v) < 0.0) s.basis.clip_negative(v);
    const double trace = detail::coords_trace(v.data(), dim);
    if (!std::isfinite(trace) || !(trace > 0.0)) {
      throw NumericalFailure("fisher_mc: non-finite state at step " + std::to_string(i));
    }
    for (int k = 0; k < size; ++k) v[k] /= trace;
    record(i + 1);
  }
  return out;
}

}  // namespace

namespace {

std::vector<PathResult> score_paths(const SystemModel& model, double theta, const FisherOptions& options) {
  if (!(options.dt > 0.0) || !(options.duration >= options.dt)) throw InvalidArgument("fisher_mc: need dt > 0 and T >= dt");
  if (options.n_traj == 0) throw InvalidArgument("fisher_mc: n_traj must be at least 1");
  const std::vector<double> times = options.checkpoints.empty() ? std::vector<double>{options.duration} : options.checkpoints;
  const std::vector<std::size_t> steps = checkpoint_steps(options, times);
  const auto n_steps = static_cast<std::size_t>(std::llround(options.duration / options.dt));

  const ScoreOperators op(model, theta, options.dtheta);
  DensityMatrix rho0 = DensityMatrix::Zero(model.dim(), model.dim());
  DensityMatrix zeta0 = DensityMatrix::Zero(model.dim(), model.dim());
  if (options.initial == InitialState::kSteadyState) {
    rho0 = model.steady_state(theta);
    if (options.score_init == ScoreInitialization::kSteadyStateDerivative) {
      zeta0 = model.steady_state_derivative(theta, options.dtheta);
    }
  } else {
    rho0(0, 0) = 1.0;
  }
  const Eigen::VectorXd v0 = op.sme.basis.coordinates(rho0);
  const Eigen::VectorXd z0 = op.sme.basis.coordinates(zeta0);
  const std::vector<double> v(v0.data(), v0.data() + v0.size());
  const std::vector<double> z(z0.data(), z0.data() + z0.size());

  std::optional<KrausPair> kraus;
  if (options.scheme == SmeScheme::kKraus) {
    kraus.emplace(KrausPair{detail::KrausPolynomial(model, theta, options.dt),
                            kraus_derivative(model, theta, options.dt, options.dtheta)});
  }
  const KrausPair* kp = kraus ? &*kraus : nullptr;

  return parallel_map<PathResult>(options.n_traj, options.workers, [&](std::size_t k) {
    const RngSpec rng{options.base_seed, k};
    if (op.sme.n == 4) return score_path<4>(op, kp, options.dt, n_steps, v, z, steps, rng);
    return score_path<0>(op, kp, options.dt, n_steps, v, z, steps, rng);
  });
}

struct MeanAndError {
  double mean = 0.0;
  double stderr_ = 0.0;
};

MeanAndError mean_and_error(const std::vector<double>& values) {
  const auto n = static_cast<double>(values.size());
  const double mean = pairwise_sum(values) / n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  return {mean, values.size() > 1 ? std::sqrt(var / (n - 1.0) / n) : 0.0};
}

}  // namespace

std::vector<std::vector<double>> fisher_scores(const SystemModel& model, double theta, const FisherOptions& options) {
  std::vector<std::vector<double>> out;
  for (auto& p : score_paths(model, theta, options)) out.push_back(std::move(p.score));
  return out;
}

std::vector<FisherReport> fisher_mc(const SystemModel& model, double theta, const FisherOptions& options,
                                    double qfi_per_time) {
  const auto paths = score_paths(model, theta, options);
  const std::vector<double> times = options.checkpoints.empty() ? std::vector<double>{options.duration} : options.checkpoints;

  std::vector<FisherReport> reports;
  for (std::size_t c = 0; c < times.size(); ++c) {
    std::vector<double> s(paths.size()), s2(paths.size()), qv(paths.size());
    for (std::size_t k = 0; k < paths.size(); ++k) {
      s[k] = paths[k].score[c];
      s2[k] = s[k] * s[k];
      qv[k] = paths[k].quadratic_variation[c];
    }
    const MeanAndError score = mean_and_error(s);
    const MeanAndError square = mean_and_error(s2);
    const MeanAndError variation = mean_and_error(qv);

    FisherReport r;
    r.time = times[c];
    r.estimate = square.mean;
    r.stderr_ = square.stderr_;
    r.score_mean = score.mean;
    r.score_stderr = score.stderr_;
    r.quadratic_variation = variation.mean;
    r.quadratic_variation_stderr = variation.stderr_;
    r.n_traj = paths.size();
    r.dt = options.dt;
    r.qfi_reference = qfi_per_time * times[c];
    reports.push_back(r);
  }
  return reports;
}

}  // namespace homest
