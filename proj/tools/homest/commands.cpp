#include "commands.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include <spdlog/spdlog.h>

#include "homest/correlations.hpp"
#include "homest/error.hpp"
#include "homest/inference.hpp"
#include "homest/linear_filter.hpp"
#include "homest/parallel.hpp"
#include "homest/regression.hpp"
#include "homest/spectrum.hpp"
#include "homest/trajectory.hpp"
#include "homest/twolevel.hpp"
#include "output.hpp"

namespace homest::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Setup {
  QubitConfig qubit;
  SystemModel model;
  double theta;
};

Setup make_setup(const ExperimentConfig& c) {
  QubitConfig q = qubit_config(c.model);
  SystemModel m = make_qubit_model(q);
  const double theta = true_parameter(q);
  return {q, std::move(m), theta};
}

InitialState initial_state(const ExperimentConfig& c) {
  return c.simulation.initial == "ground" ? InitialState::kGround : InitialState::kSteadyState;
}

SmeScheme scheme(const ExperimentConfig& c) {
  return c.simulation.scheme == "euler_maruyama" ? SmeScheme::kEulerMaruyama : SmeScheme::kKraus;
}

SimulationOptions simulation_options(const ExperimentConfig& c) {
  SimulationOptions o;
  o.duration = c.simulation.duration;
  o.dt = c.simulation.dt;
  o.initial = initial_state(c);
  o.scheme = scheme(c);
  o.keep_states = c.simulation.keep_states;
  return o;
}

TwoTimeOptions two_time_options(const ExperimentConfig& c) {
  TwoTimeOptions o;
  o.dtheta = c.analysis.dtheta;
  o.dtau = c.analysis.qrt_dtau;
  o.tau_max = c.analysis.tau_max;
  return o;
}

// Closed forms only exist for the resonant qubit with Ω as the unknown.
bool resonant_omega(const ExperimentConfig& c) {
  return c.model.detuning == 0.0 && c.model.parameter == "omega";
}

twolevel::QubitParams qubit_params(const ModelBlock& m) {
  return {m.omega, m.gamma, m.phase, m.efficiency, m.detuning};
}

// √η Tr[(c e^{−iΦ} + c† e^{iΦ}) ρ]
double conditional_signal(const SystemModel& model, double theta, const DensityMatrix& rho) {
  const Operator c = model.monitored_operator(theta);
  const Operator x = c * std::polar(1.0, -model.phase()) + c.adjoint() * std::polar(1.0, model.phase());
  return std::sqrt(model.efficiency()) * (x * rho).trace().real();
}

void simulate(const ExperimentConfig& c, OutputDir& out) {
  const Setup s = make_setup(c);
  const SimulationOptions opts = simulation_options(c);
  struct Result {
    MeasurementRecord record;
    std::vector<double> signal;
    RepairStats repairs;
  };
  const auto results = map_ensemble<Result>(
      s.model, s.theta, opts, c.simulation.n_traj, c.simulation.base_seed, c.workers,
      [&](std::size_t, const Trajectory& t) {
        Result r{t.record, {}, t.repairs};
        if (t.states) {
          r.signal.resize(t.record.n_steps());
          for (std::size_t i = 0; i < r.signal.size(); ++i) {
            r.signal[i] = conditional_signal(s.model, s.theta, t.states->state(i));
          }
        }
        return r;
      });

  std::vector<std::string> columns = {"stream", "step", "t", "dy", "current"};
  if (opts.keep_states) columns.push_back("signal");
  Table records(columns);
  Json per_stream = Json::array();
  for (const auto& r : results) {
    const auto& rec = r.record;
    for (std::size_t i = 0; i < rec.n_steps(); ++i) {
      std::vector<double> row = {static_cast<double>(rec.stream), static_cast<double>(i),
                                 static_cast<double>(i) * rec.dt, rec.dy[i], rec.current(i)};
      if (opts.keep_states) row.push_back(r.signal[i]);
      records.add_row(row);
    }
    per_stream.push_back({{"seed", rec.seed},
                          {"stream", rec.stream},
                          {"integrated_signal", integrated_signal(rec)},
                          {"negative_steps", r.repairs.negative_steps},
                          {"clipped_steps", r.repairs.clipped_steps},
                          {"min_eigenvalue", r.repairs.min_eigenvalue},
                          {"min_purity", r.repairs.min_purity}});
  }
  out.table("trajectories", records);
  out.json("summary", {{"command", "simulate"},
                       {"theta_true", s.theta},
                       {"mean_signal", mean_signal(s.model, s.theta)},
                       {"model_fingerprint", s.model.fingerprint()},
                       {"records", per_stream}});
}

void bayes(const ExperimentConfig& c, OutputDir& out) {
  const Setup s = make_setup(c);
  const SimulationOptions opts = simulation_options(c);
  const ParameterGrid grid = ParameterGrid::uniform(c.analysis.grid_lo, c.analysis.grid_hi, c.analysis.grid_points);
  const std::vector<double> times = checkpoint_times(c);
  FilterOptions filter;
  filter.initial = opts.initial;
  filter.scheme = opts.scheme;
  filter.workers = 1;  // parallel over seeds instead

  const auto traces = map_ensemble<PosteriorTrace>(
      s.model, s.theta, opts, c.simulation.n_traj, c.simulation.base_seed, c.workers,
      [&](std::size_t, const Trajectory& t) { return bayes_posterior(t.record, s.model, grid, times, filter); });

  Table posterior({"stream", "time", "theta", "log_posterior", "posterior"});
  Table summary({"stream", "time", "map", "fwhm", "mean", "stddev"});
  std::vector<double> map_sum(times.size(), 0.0), fwhm_sum(times.size(), 0.0);
  std::vector<std::size_t> covered(times.size(), 0);
  for (std::size_t k = 0; k < traces.size(); ++k) {
    const auto& tr = traces[k];
    for (std::size_t ci = 0; ci < tr.times.size(); ++ci) {
      const std::vector<double> p = tr.posterior(ci);
      for (std::size_t j = 0; j < tr.thetas.size(); ++j) {
        posterior.add_row({static_cast<double>(k), tr.times[ci], tr.thetas[j], tr.log_posterior[ci][j], p[j]});
      }
      summary.add_row({static_cast<double>(k), tr.times[ci], tr.map[ci], tr.fwhm[ci], tr.mean[ci], tr.stddev[ci]});
      map_sum[ci] += tr.map[ci];
      fwhm_sum[ci] += tr.fwhm[ci];
      if (std::abs(tr.map[ci] - s.theta) <= 3.0 * tr.stddev[ci]) ++covered[ci];
    }
  }
  out.table("posterior", posterior);
  out.table("posterior_summary", summary);

  Json checkpoints = Json::array();
  const auto n = static_cast<double>(traces.size());
  for (std::size_t ci = 0; ci < times.size(); ++ci) {
    checkpoints.push_back({{"time", times[ci]},
                           {"mean_map", map_sum[ci] / n},
                           {"mean_fwhm", fwhm_sum[ci] / n},
                           {"fraction_within_3_stddev", static_cast<double>(covered[ci]) / n}});
  }
  out.json("summary", {{"command", "bayes"}, {"theta_true", s.theta}, {"checkpoints", checkpoints}});
}

void fisher(const ExperimentConfig& c, OutputDir& out) {
  const Setup s = make_setup(c);
  FisherOptions f;
  f.duration = c.simulation.duration;
  f.dt = c.simulation.dt;
  f.n_traj = c.simulation.n_traj;
  f.base_seed = c.simulation.base_seed;
  f.checkpoints = checkpoint_times(c);
  f.initial = initial_state(c);
  f.scheme = scheme(c);
  f.score_init = c.analysis.score_init == "zero" ? ScoreInitialization::kZero : ScoreInitialization::kSteadyStateDerivative;
  f.dtheta = c.analysis.dtheta;
  f.workers = c.workers;
  const double qfi_rate = resonant_omega(c) ? twolevel::qfi_reference(c.model.gamma, 1.0) : kNaN;

  const auto reports = fisher_mc(s.model, s.theta, f, qfi_rate);
  const double i1 = fisher_mean_signal(s.model, s.theta, c.analysis.dtheta);
  const double i2 = fisher_two_time(s.model, s.theta, two_time_options(c));

  Table t({"time", "estimate", "stderr", "estimate_per_time", "stderr_per_time", "quadratic_variation",
           "quadratic_variation_stderr", "score_mean", "score_stderr", "n_traj", "dt", "qfi_reference"});
  Json rows = Json::array();
  for (const auto& r : reports) {
    const double per = r.time > 0.0 ? 1.0 / r.time : kNaN;
    t.add_row({r.time, r.estimate, r.stderr_, r.estimate * per, r.stderr_ * per, r.quadratic_variation,
               r.quadratic_variation_stderr, r.score_mean, r.score_stderr, static_cast<double>(r.n_traj), r.dt,
               r.qfi_reference});
  }
  out.table("fisher", t);
  out.json("summary", {{"command", "fisher"},
                       {"theta_true", s.theta},
                       {"i1_per_time", i1},
                       {"i2_per_time", i2},
                       {"i1_plus_i2_per_time", i1 + i2},
                       {"qfi_per_time", qfi_rate},
                       {"final_estimate_per_time", reports.back().time > 0 ? reports.back().estimate / reports.back().time : kNaN},
                       {"final_stderr_per_time", reports.back().time > 0 ? reports.back().stderr_ / reports.back().time : kNaN}});
}

void correlate(const ExperimentConfig& c, OutputDir& out) {
  const Setup s = make_setup(c);
  const SimulationOptions opts = simulation_options(c);
  const LagGrid grid{c.analysis.dtau, c.analysis.lags};
  const bool subtract = c.analysis.mean_subtract;
  struct Pair {
    CorrelationSample requested;
    CorrelationSample centred;
  };
  const auto pairs = map_ensemble<Pair>(s.model, s.theta, opts, c.simulation.n_traj, c.simulation.base_seed, c.workers,
                                        [&](std::size_t, const Trajectory& t) {
                                          Pair p;
                                          p.centred = record_correlation(t.record, grid, true);
                                          p.requested = subtract ? p.centred : record_correlation(t.record, grid, false);
                                          return p;
                                        });
  std::vector<CorrelationSample> requested, centred;
  for (const auto& p : pairs) {
    requested.push_back(p.requested);
    centred.push_back(p.centred);
  }
  const double duration = c.simulation.duration;
  const CorrelationEstimate est = aggregate_correlations(requested, grid, subtract, duration);
  const std::vector<double> qrt = qrt_two_time(s.model, s.theta, est.tau, subtract);
  const LinearFilterReference ref = make_linear_filter_reference(s.model, s.theta, grid, true, c.analysis.dtheta);

  // A mean-subtracted C − Y² from a finite record sits S(0)/T below the QRT value.
  Table corr({"tau", "empirical", "stderr", "qrt", "expected"});
  for (std::size_t l = 0; l < est.tau.size(); ++l) {
    const double expected = subtract ? qrt[l] - ref.s_zero / duration : qrt[l];
    corr.add_row({est.tau[l], est.mean[l], est.stderr_[l], qrt[l], expected});
  }
  out.table("correlation", corr);

  Json summary = {{"command", "correlate"},
                  {"theta_true", s.theta},
                  {"n_records", est.n_records},
                  {"y_mean", est.y_mean},
                  {"mean_signal", mean_signal(s.model, s.theta)},
                  {"s_zero", ref.s_zero},
                  {"lag_variance_reference", 1.0 / (duration * grid.dtau)},
                  {"signal_variance_reference", 1.0 / duration}};
  if (centred.size() >= 2) {
    const GaussianStatVector g = empirical_covariance(centred);
    Table cov({"row", "col", "covariance", "stderr"});
    for (Eigen::Index i = 0; i < g.covariance.rows(); ++i) {
      for (Eigen::Index j = 0; j < g.covariance.cols(); ++j) {
        cov.add_row({static_cast<double>(i), static_cast<double>(j), g.covariance(i, j), g.covariance_stderr(i, j)});
      }
    }
    out.table("covariance", cov);
  } else {
    spdlog::warn("correlate: covariance needs at least two records; skipped");
  }
  out.json("summary", summary);
}

void spectrum(const ExperimentConfig& c, OutputDir& out) {
  const Setup s = make_setup(c);
  const double dtau = c.analysis.qrt_dtau;
  const auto count = static_cast<std::size_t>(std::llround(c.analysis.tau_max / dtau));
  const std::vector<double> f = qrt_uniform(s.model, s.theta, dtau, count, true);
  const double f0 = qrt_zero_limit(s.model, s.theta, true);
  const std::vector<double> omega = symmetric_grid(c.analysis.omega_max, c.analysis.omega_points);
  SpectrumOptions so;
  so.include_shot_floor = c.analysis.shot_floor;
  const Spectrum sp = power_spectrum(f, f0, dtau, omega, so);
  if (sp.truncated) {
    throw NumericalFailure("spectrum: correlation has not decayed at tau_max (ratio " + format_number(sp.decay_ratio) +
                           "); raise analysis.tau_max");
  }
  Table t({"omega", "spectrum"});
  for (std::size_t i = 0; i < sp.omega.size(); ++i) t.add_row({sp.omega[i], sp.value[i]});
  out.table("spectrum", t);
  out.json("summary", {{"command", "spectrum"},
                       {"theta_true", s.theta},
                       {"f1_zero", f0},
                       {"decay_ratio", sp.decay_ratio},
                       {"shot_floor", c.analysis.shot_floor}});
}

void sweep(const ExperimentConfig& c, OutputDir& out) {
  const std::size_t np = c.analysis.sweep_phase_points;
  const std::vector<double>& omegas = c.analysis.sweep_omegas;
  std::vector<double> phases(np);
  for (std::size_t i = 0; i < np; ++i) phases[i] = std::numbers::pi * static_cast<double>(i) / static_cast<double>(np - 1);

  struct Point {
    double i1 = 0.0;
    double i2 = 0.0;
    double i1_closed = kNaN;
  };
  const TwoTimeOptions tt = two_time_options(c);
  const bool closed = resonant_omega(c);
  const auto points = parallel_map<Point>(np * omegas.size(), c.workers, [&](std::size_t k) {
    ModelBlock m = c.model;
    m.omega = omegas[k / np];
    m.phase = phases[k % np];
    const QubitConfig q = qubit_config(m);
    const SystemModel model = make_qubit_model(q);
    const double theta = true_parameter(q);
    Point p;
    p.i1 = fisher_mean_signal(model, theta, c.analysis.dtheta);
    p.i2 = fisher_two_time(model, theta, tt);
    if (closed) p.i1_closed = twolevel::i1_closed(qubit_params(m));
    return p;
  });

  const double qfi_rate = closed ? twolevel::qfi_reference(c.model.gamma, 1.0) : kNaN;
  Table grid({"phase", "omega", "i1", "i2", "total", "i1_closed", "qfi"});
  Table best({"omega", "phase", "i1", "i2", "total"});
  for (std::size_t o = 0; o < omegas.size(); ++o) {
    std::size_t arg = 0;
    for (std::size_t i = 0; i < np; ++i) {
      const Point& p = points[o * np + i];
      grid.add_row({phases[i], omegas[o], p.i1, p.i2, p.i1 + p.i2, p.i1_closed, qfi_rate});
      const Point& b = points[o * np + arg];
      if (p.i1 + p.i2 > b.i1 + b.i2) arg = i;
    }
    const Point& b = points[o * np + arg];
    best.add_row({omegas[o], phases[arg], b.i1, b.i2, b.i1 + b.i2});
  }
  out.table("sweep", grid);
  out.table("sweep_argmax", best);
  out.json("summary", {{"command", "sweep"}, {"phase_points", np}, {"omegas", omegas}, {"qfi_per_time", qfi_rate}});
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"simulate", "bayes", "fisher", "correlate", "spectrum", "sweep"};
  return names;
}

void run_command(const std::string& name, const ExperimentConfig& config) {
  OutputDir out(config.output.directory, to_json(config), config.output.format);
  spdlog::info("{}: writing to {}", name, out.directory().string());
  if (name == "simulate") simulate(config, out);
  else if (name == "bayes") bayes(config, out);
  else if (name == "fisher") fisher(config, out);
  else if (name == "correlate") correlate(config, out);
  else if (name == "spectrum") spectrum(config, out);
  else if (name == "sweep") sweep(config, out);
  else throw ConfigError("unknown subcommand '" + name + "'");
  out.text("config.resolved.json", to_json(config).dump(2) + "\n");
  out.commit();
  spdlog::info("{}: wrote {} files", name, out.written().size());
}

}  // namespace homest::cli
