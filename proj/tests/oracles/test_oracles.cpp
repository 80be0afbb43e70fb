// Library numerics against the independent implementations in oracles.hpp.
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "homest/correlations.hpp"
#include "homest/model.hpp"
#include "homest/qops.hpp"
#include "homest/regression.hpp"
#include "homest/rng.hpp"
#include "homest/twolevel.hpp"

using namespace homest;

namespace {

oracle::Mat random_operator(std::mt19937_64& gen, int d) {
  std::normal_distribution<double> n;
  oracle::Mat a(d, d);
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) a(j, k) = {n(gen), n(gen)};
  }
  return a;
}

}  // namespace

TEST(OracleLiouvillian, MatchesBruteForceOnRandomSystems) {
  std::mt19937_64 gen(11);
  for (int d : {2, 3, 5}) {
    for (int rep = 0; rep < 5; ++rep) {
      const oracle::Mat a = random_operator(gen, d);
      const oracle::Mat h = 0.5 * (a + a.adjoint());
      const std::vector<oracle::Mat> cs = {random_operator(gen, d), random_operator(gen, d)};
      const std::vector<Operator> ops(cs.begin(), cs.end());
      const Superoperator l = build_liouvillian(h, ops);
      EXPECT_LT((l.matrix() - oracle::brute_force_liouvillian(h, cs)).norm(), 1e-12) << d;
    }
  }
}

TEST(OracleLiouvillian, QubitModelMatchesBruteForce) {
  QubitConfig c;
  c.omega = 1.7;
  c.detuning = -0.4;
  c.gamma = 0.8;
  const SystemModel m = make_qubit_model(c);
  const std::vector<oracle::Mat> cs = {oracle::qubit_c(0.8)};
  EXPECT_LT((m.liouvillian(1.7).matrix() - oracle::brute_force_liouvillian(oracle::qubit_h(1.7, -0.4), cs)).norm(),
            1e-13);
}

TEST(OraclePropagator, MatchesAdaptiveOde) {
  const oracle::Mat h = oracle::qubit_h(1.0);
  const std::vector<oracle::Mat> cs = {oracle::qubit_c()};
  oracle::Mat excited = oracle::Mat::Zero(2, 2);
  excited(1, 1) = 1.0;
  const Superoperator l = build_liouvillian(h, std::vector<Operator>(cs.begin(), cs.end()));
  for (double tau : {0.1, 1.0, 5.0}) {
    const Operator p = propagator(l, tau).apply(excited);
    EXPECT_LT((p - oracle::ode_evolve(h, cs, excited, tau)).norm(), 1e-8) << tau;
  }
}

TEST(OracleSteadyState, MatchesBlochClosedForm) {
  for (double omega : {0.1, 1.0, 4.0}) {
    QubitConfig c;
    c.omega = omega;
    const SystemModel m = make_qubit_model(c);
    EXPECT_LT((m.steady_state(omega) - oracle::qubit_steady_state(omega)).norm(), 1e-12) << omega;
  }
}

TEST(OraclePhilox, MatchesReferenceRounds) {
  std::mt19937_64 gen(5);
  for (int i = 0; i < 1000; ++i) {
    const auto w = [&] { return static_cast<std::uint32_t>(gen()); };
    const Philox4x32::Counter ctr = {w(), w(), w(), w()};
    const Philox4x32::Key key = {w(), w()};
    EXPECT_EQ(Philox4x32::generate(ctr, key), oracle::philox(ctr, key));
  }
}

TEST(OracleQrt, ZeroPhaseCorrelationMatchesClosedForm) {
  for (double omega : {0.5, 1.0, 3.0}) {
    QubitConfig c;
    c.omega = omega;
    c.phase = 0.0;
    const SystemModel m = make_qubit_model(c);
    twolevel::QubitParams p;
    p.omega = omega;
    std::vector<double> taus;
    for (int k = 1; k <= 50; ++k) taus.push_back(0.2 * k);
    const auto f = qrt_two_time(m, omega, taus);
    for (std::size_t k = 0; k < taus.size(); ++k) EXPECT_NEAR(f[k], twolevel::f1_phi0(p, taus[k]), 1e-8) << taus[k];
  }
}

TEST(OracleMeanSignalFisher, ClosedFormMatchesFiniteDifference) {
  for (double phase : {0.3, std::numbers::pi / 2}) {
    for (double omega : {0.2, 1.0, 2.0, 5.0}) {
      twolevel::QubitParams p;
      p.omega = omega;
      p.phase = phase;
      QubitConfig c;
      c.omega = omega;
      c.phase = phase;
      const double h = 1e-4;
      const SystemModel m = make_qubit_model(c);
      const double d = (mean_signal(m, omega + h) - mean_signal(m, omega - h)) / (2 * h);
      EXPECT_NEAR(twolevel::i1_closed(p), d * d, 1e-3 * d * d + 1e-12) << omega;
    }
  }
}

TEST(OracleFilter, KrausMeanIsTracePreservingToSecondOrder) {
  // E[P(dy)] is the Kraus channel averaged over the Gaussian record: trace loss is O(dt²).
  const auto fm = oracle::filter_model(2.0, 0.6, 0.7);
  const oracle::MatL rho = oracle::qubit_steady_state(2.0).cast<oracle::cld>();
  for (double dt : {1e-2, 1e-3}) {
    const oracle::ld loss = std::abs(oracle::kraus_mean(fm, rho, dt).trace().real() - 1);
    EXPECT_LT(static_cast<double>(loss), 2.0 * dt * dt);
  }
}
