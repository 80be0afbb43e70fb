#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "homest/model.hpp"
#include "homest/trajectory.hpp"

namespace homest {

/// Candidate values of θ with prior log-weights (normalized on construction).
class ParameterGrid {
 public:
  /// Flat prior. Throws InvalidArgument unless values are strictly increasing.
  explicit ParameterGrid(std::vector<double> values);
  ParameterGrid(std::vector<double> values, std::vector<double> log_prior);

  static ParameterGrid uniform(double lo, double hi, std::size_t points);

  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<const double> log_prior() const { return log_prior_; }

 private:
  std::vector<double> values_;
  std::vector<double> log_prior_;
};

struct FilterOptions {
  InitialState initial = InitialState::kSteadyState;
  /// kKraus: the likelihood of each increment is Tr[P(dy)ρ]/Tr[P̄ρ] for the positive map that
  /// also drives simulate_homodyne. kEulerMaruyama: the linear filter
  /// ρ̄' = ρ̄ + Lρ̄ dt + √η dy 𝓧ρ̄. Both give exactly zero at η = 0.
  SmeScheme scheme = SmeScheme::kKraus;
  /// Fold the accumulated weight into the log domain every this many steps; the result does
  /// not depend on it.
  std::size_t renormalize_every = 1;
  unsigned workers = 0;
};

/// log P(record | θ) up to a θ-independent constant, from the un-normalized filter selected by
/// FilterOptions::scheme, propagated in the log domain.
double loglik(const MeasurementRecord& record, const SystemModel& model, double theta,
              const FilterOptions& options = {});

/// Log-likelihoods of every candidate at the requested step indices (one row per checkpoint).
/// All candidates are propagated through the record in lockstep.
std::vector<std::vector<double>> loglik_bank(const MeasurementRecord& record, const SystemModel& model,
                                             std::span<const double> thetas, std::span<const std::size_t> checkpoint_steps,
                                             const FilterOptions& options = {});

struct PosteriorTrace {
  std::vector<double> times;
  std::vector<double> thetas;
  /// Normalized log-posterior, [checkpoint][candidate].
  std::vector<std::vector<double>> log_posterior;
  std::vector<double> map;
  std::vector<double> fwhm;
  std::vector<double> mean;
  std::vector<double> stddev;

  std::vector<double> posterior(std::size_t checkpoint) const;
};

/// Bayes' rule on the grid at each checkpoint time (0 ≤ t ≤ T). Throws NumericalFailure when all
/// log-weights are −∞ and InvalidArgument for checkpoints outside the record.
PosteriorTrace bayes_posterior(const MeasurementRecord& record, const SystemModel& model, const ParameterGrid& grid,
                               std::span<const double> checkpoints, const FilterOptions& options = {});

/// Summary of a normalized distribution on a grid.
struct PosteriorSummary {
  double map = 0.0;
  double fwhm = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
};
/// FWHM uses linear interpolation of the half-maximum crossings on either side of the MAP; a side
/// without a crossing extends to the grid edge.
PosteriorSummary summarize_posterior(std::span<const double> thetas, std::span<const double> probabilities);

enum class ScoreInitialization {
  /// ζ(0) = ∂ρ_st/∂θ, consistent with a steady-state initial condition.
  kSteadyStateDerivative,
  kZero,
};

struct FisherOptions {
  double duration = 20.0;
  double dt = 1e-3;
  std::size_t n_traj = 1000;
  std::uint64_t base_seed = 1;
  std::vector<double> checkpoints;  // defaults to {duration}
  InitialState initial = InitialState::kSteadyState;
  /// With kKraus, ζ is the exact θ-derivative of the discrete Kraus filter that advances ρ; with
  /// kEulerMaruyama both take the Euler–Maruyama step of their Itô equations.
  SmeScheme scheme = SmeScheme::kKraus;
  ScoreInitialization score_init = ScoreInitialization::kSteadyStateDerivative;
  double dtheta = kDefaultDTheta;
  unsigned workers = 0;
};

struct FisherReport {
  double time = 0.0;
  /// Monte-Carlo estimate of 𝓘(θ; t) = E[(Tr ζ)²], units [θ]⁻².
  double estimate = 0.0;
  double stderr_ = 0.0;
  /// Sample mean and standard error of the score Tr ζ (zero in expectation).
  double score_mean = 0.0;
  double score_stderr = 0.0;
  /// Companion estimate with the same expectation: the mean of η∫(∂_θ Tr[𝓧ρ])² dt, the
  /// predictable quadratic variation of the score (Itô isometry, Tr ζ(0) = 0). (Tr ζ)² is
  /// heavy-tailed at η = 1, and this average converges much faster.
  double quadratic_variation = 0.0;
  double quadratic_variation_stderr = 0.0;
  std::size_t n_traj = 0;
  double dt = 0.0;
  /// 4t/γ for the resonant qubit; NaN when no closed-form reference applies.
  double qfi_reference = 0.0;
};

/// Simulates trajectories and carries the score alongside the conditional state, then averages
/// its square at each checkpoint. With kEulerMaruyama the score operator follows
///   dζ = (Lζ + ∂_θL ρ) dt + √η dW (𝓧ζ + ∂_θ𝓧 ρ − Tr[𝓧ρ] ζ);
/// with kKraus the score is the exact θ-derivative of the loglik() sum, accumulated step by step
/// from ∂ρ and ∂P.
/// `qfi_per_time` fills FisherReport::qfi_reference as qfi_per_time·t.
std::vector<FisherReport> fisher_mc(const SystemModel& model, double theta, const FisherOptions& options,
                                    double qfi_per_time = std::numeric_limits<double>::quiet_NaN());

/// Per-trajectory scores Tr ζ at the checkpoints (stream k → row k). Exposed for diagnostics.
std::vector<std::vector<double>> fisher_scores(const SystemModel& model, double theta, const FisherOptions& options);

}  // namespace homest
