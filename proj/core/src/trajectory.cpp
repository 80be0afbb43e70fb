#include "homest/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <spdlog/spdlog.h>

#include "homest/error.hpp"
#include "sme_kernel.hpp"

namespace homest {

namespace detail {

std::vector<double> to_row_major(const Eigen::MatrixXd& m) {
  std::vector<double> out(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(i * m.cols() + j)] = m(i, j);
  }
  return out;
}

SmeOperators::SmeOperators(const SystemModel& model, double theta) : basis(model.dim()), n(basis.size()) {
  const Eigen::MatrixXd l = basis.real_matrix(model.liouvillian(theta));
  const Eigen::MatrixXd x = basis.real_matrix(model.measurement(theta));
  liouvillian = to_row_major(l);
  measurement = to_row_major(x);
  const Eigen::VectorXd tx = (basis.trace_row().transpose() * x).transpose();
  trace_x.assign(tx.data(), tx.data() + tx.size());
  sqrt_eta = std::sqrt(model.efficiency());
}

namespace {

Superoperator sandwich(const Operator& x, const Operator& y) { return left_multiply(x) * right_multiply(y.adjoint()); }

}  // namespace

KrausPolynomial::KrausPolynomial(const SystemModel& model, double theta, double dt) {
  const HermitianBasis basis(model.dim());
  n = basis.size();
  const Operator h = model.hamiltonian(theta);
  const std::vector<Operator> cs = model.collapse_ops(theta);
  const std::size_t monitored = model.channel().monitored_index;
  const double eta = model.efficiency();
  const auto id = Operator::Identity(model.dim(), model.dim());

  Operator k = Complex{0.0, 1.0} * h;
  for (const Operator& c : cs) k += 0.5 * c.adjoint() * c;
  const Operator a = cs[monitored] * std::exp(Complex{0.0, -model.phase()});
  const Operator m0 = id - dt * k;
  const Operator m1 = std::sqrt(eta) * a;
  const Operator m2 = 0.5 * eta * a * a;

  const Superoperator cc = sandwich(m2, m2);
  const Superoperator c0 = sandwich(m2, m0) + sandwich(m0, m2);
  const Superoperator c1 = sandwich(m2, m1) + sandwich(m1, m2);
  Superoperator s0 = sandwich(m0, m0) - c0 * Complex{dt} + cc * Complex{dt * dt} + sandwich(a, a) * Complex{(1.0 - eta) * dt};
  for (std::size_t j = 0; j < cs.size(); ++j) {
    if (j != monitored) s0 = s0 + sandwich(cs[j], cs[j]) * Complex{dt};
  }
  const std::array<Superoperator, 5> terms = {
      s0,
      sandwich(m1, m0) + sandwich(m0, m1) - c1 * Complex{dt},
      sandwich(m1, m1) + c0 - cc * Complex{2.0 * dt},
      c1,
      cc,
  };
  for (std::size_t j = 0; j < terms.size(); ++j) p[j] = to_row_major(basis.real_matrix(terms[j]));
  mean.resize(p[0].size());
  for (std::size_t j = 0; j < mean.size(); ++j) mean[j] = p[0][j] + dt * p[2][j] + 3.0 * dt * dt * p[4][j];
}

}  // namespace detail

StatePath::StatePath(int dim, std::size_t n_states)
    : dim_(dim), n_states_(n_states), coords_(n_states * static_cast<std::size_t>(dim * dim)) {}

std::span<const double> StatePath::coordinates(std::size_t i) const {
  const auto n = static_cast<std::size_t>(dim_ * dim_);
  return std::span<const double>(coords_).subspan(i * n, n);
}

std::span<double> StatePath::coordinates(std::size_t i) {
  const auto n = static_cast<std::size_t>(dim_ * dim_);
  return std::span<double>(coords_).subspan(i * n, n);
}

DensityMatrix StatePath::state(std::size_t i) const { return HermitianBasis(dim_).from_coordinates(coordinates(i)); }

namespace {

void validate(const SimulationOptions& options) {
  if (!(options.dt > 0.0) || !std::isfinite(options.dt)) throw InvalidArgument("simulate: dt must be positive");
  if (!(options.duration >= options.dt) || !std::isfinite(options.duration)) {
    throw InvalidArgument("simulate: duration must be at least dt");
  }
  if (options.dt > 0.01) {
    spdlog::warn("simulate: dt = {} exceeds 0.01/gamma; Euler-Maruyama bias may be significant", options.dt);
  }
}

template <int N>
void integrate(const detail::SmeOperators& op, const detail::KrausPolynomial* kraus, double dt, NormalStream& noise,
               std::vector<double>& v, std::vector<double>& dy, StatePath* path, RepairStats& stats) {
  const int n = op.n;
  const int dim = op.basis.dim();
  const double sqrt_dt = std::sqrt(dt);
  std::vector<double> lv(n), xv(n);
  const double* l = op.liouvillian.data();
  const double* x_mat = op.measurement.data();
  const double* tx = op.trace_x.data();

  if (path != nullptr) std::copy(v.begin(), v.end(), path->coordinates(0).begin());

  for (std::size_t i = 0; i < dy.size(); ++i) {
    const double x = detail::dot<N>(tx, v.data(), n);
    const double dw = sqrt_dt * noise.next();
    dy[i] = op.sqrt_eta * x * dt + dw;

    if (kraus != nullptr) {
      detail::kraus_apply<N>(*kraus, v.data(), dy[i], lv.data(), xv.data());
      std::copy(lv.begin(), lv.end(), v.begin());
    } else {
      detail::matvec<N>(l, v.data(), lv.data(), n);
      detail::matvec<N>(x_mat, v.data(), xv.data(), n);
      const double kick = op.sqrt_eta * dw;
      for (int k = 0; k < (N > 0 ? N : n); ++k) v[k] += dt * lv[k] + kick * (xv[k] - x * v[k]);
    }

    const double lambda = op.basis.min_eigenvalue(v);
    stats.min_eigenvalue = std::min(stats.min_eigenvalue, lambda);
    if (lambda < -1e-9) ++stats.negative_steps;
    if (lambda < 0.0 && op.basis.clip_negative(v)) ++stats.clipped_steps;

    const double trace = detail::coords_trace(v.data(), dim);
    if (!std::isfinite(trace) || !(trace > 0.0)) {
      throw NumericalFailure("simulate: non-finite or vanishing state at step " + std::to_string(i) +
                             " (dt too large?)");
    }
    double purity = 0.0;
    for (int k = 0; k < (N > 0 ? N : n); ++k) {
      v[k] /= trace;
      purity += v[k] * v[k];
    }
    stats.min_purity = std::min(stats.min_purity, purity);
    if (path != nullptr) std::copy(v.begin(), v.end(), path->coordinates(i + 1).begin());
  }
  stats.steps += dy.size();
}

}  // namespace

Trajectory simulate_homodyne(const SystemModel& model, double theta_true, const SimulationOptions& options,
                             RngSpec rng) {
  validate(options);
  const auto n_steps = static_cast<std::size_t>(std::llround(options.duration / options.dt));

  const detail::SmeOperators op(model, theta_true);
  const DensityMatrix rho0 =
      options.initial == InitialState::kSteadyState ? model.steady_state(theta_true) : [&] {
        DensityMatrix g = DensityMatrix::Zero(model.dim(), model.dim());
        g(0, 0) = 1.0;
        return g;
      }();
  const Eigen::VectorXd coords = op.basis.coordinates(rho0);
  std::vector<double> v(coords.data(), coords.data() + coords.size());

  Trajectory out;
  out.record.dt = options.dt;
  out.record.dy.resize(n_steps);
  out.record.seed = rng.base_seed;
  out.record.stream = rng.stream_index;
  out.record.theta_true = theta_true;
  out.record.model_fingerprint = model.fingerprint();
  if (options.keep_states) out.states.emplace(model.dim(), n_steps + 1);

  NormalStream noise(rng);
  StatePath* path = out.states ? &*out.states : nullptr;
  std::optional<detail::KrausPolynomial> kraus;
  if (options.scheme == SmeScheme::kKraus) kraus.emplace(model, theta_true, options.dt);
  const detail::KrausPolynomial* k = kraus ? &*kraus : nullptr;
  if (op.n == 4) {
    integrate<4>(op, k, options.dt, noise, v, out.record.dy, path, out.repairs);
  } else {
    integrate<0>(op, k, options.dt, noise, v, out.record.dy, path, out.repairs);
  }
  if (out.repairs.clipped_steps > 0) {
    spdlog::debug("simulate: stream {} clipped {} of {} steps (min eigenvalue {:.3e})", rng.stream_index,
                  out.repairs.clipped_steps, out.repairs.steps, out.repairs.min_eigenvalue);
  }
  return out;
}

std::vector<MeasurementRecord> simulate_ensemble(const SystemModel& model, double theta, const SimulationOptions& options,
                                                 std::size_t n_traj, std::uint64_t base_seed, unsigned workers) {
  if (n_traj == 0) throw InvalidArgument("simulate_ensemble: n_traj must be at least 1");
  SimulationOptions opts = options;
  opts.keep_states = false;
  return parallel_map<MeasurementRecord>(n_traj, workers, [&](std::size_t k) {
    return simulate_homodyne(model, theta, opts, RngSpec{base_seed, k}).record;
  });
}

}  // namespace homest
