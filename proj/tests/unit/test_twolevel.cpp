#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "homest/correlations.hpp"
#include "homest/error.hpp"
#include "homest/model.hpp"
#include "homest/regression.hpp"
#include "homest/twolevel.hpp"

using namespace homest;
using twolevel::QubitParams;
using twolevel::Regime;

namespace {

SystemModel qubit(const QubitParams& p) {
  QubitConfig c;
  c.omega = p.omega;
  c.gamma = p.gamma;
  c.phase = p.phase;
  c.efficiency = p.efficiency;
  return make_qubit_model(c);
}

}  // namespace

TEST(TwoLevel, SteadyBloch) {
  QubitParams p;
  const auto s = twolevel::steady_bloch(p);
  EXPECT_DOUBLE_EQ(s[0], 0.0);
  EXPECT_DOUBLE_EQ(s[1], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(s[2], -1.0 / 3.0);
  p.detuning = 0.1;
  EXPECT_THROW(twolevel::steady_bloch(p), InvalidArgument);
}

TEST(TwoLevel, MeanCurrentMatchesModel) {
  for (double phase : {0.0, 0.4, std::numbers::pi / 2, 2.5}) {
    for (double omega : {0.3, 1.0, 3.0}) {
      QubitParams p;
      p.omega = omega;
      p.phase = phase;
      p.gamma = 1.7;
      p.efficiency = 0.6;
      EXPECT_NEAR(twolevel::mean_current(p), mean_signal(qubit(p), omega), 1e-12);
    }
  }
  QubitParams p;
  p.phase = std::numbers::pi / 2;
  EXPECT_NEAR(twolevel::mean_current(p), -2.0 / 3.0, 1e-15);
}

TEST(TwoLevel, ClosedFormMeanSignalFisher) {
  QubitParams p;
  p.phase = std::numbers::pi / 2;
  p.omega = 0.0;
  EXPECT_NEAR(twolevel::i1_closed(p), 4.0, 1e-15);
  p.omega = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(twolevel::i1_closed(p), 0.0, 1e-15);
  p.omega = 2.0;
  p.gamma = 1.5;
  p.efficiency = 0.4;
  EXPECT_NEAR(twolevel::i1_closed(p) / fisher_mean_signal(qubit(p), p.omega), 1.0, 1e-6);
}

TEST(TwoLevel, ZeroPhaseTwoTimeFisher) {
  for (double omega : {0.3, 1.0, 2.5}) {
    QubitParams p;
    p.omega = omega;
    p.efficiency = 0.8;
    EXPECT_NEAR(twolevel::i2_limits(p, Regime::kPhi0) / fisher_two_time(qubit(p), omega), 1.0, 5e-3) << omega;
  }
}

TEST(TwoLevel, WeakDriveLimitIsApproachedFromBelow) {
  QubitParams p;
  p.phase = std::numbers::pi / 2;
  double previous = 0.0;
  for (double omega : {0.1, 0.05, 0.02, 0.01}) {
    p.omega = omega;
    const double ratio = fisher_two_time(qubit(p), omega) / twolevel::i2_limits(p, Regime::kWeak);
    EXPECT_LT(ratio, 1.0);
    EXPECT_GT(ratio, previous);
    previous = ratio;
  }
  EXPECT_GT(previous, 0.99);
}

TEST(TwoLevel, StrongDriveTendsToConstant) {
  QubitParams p;
  p.phase = std::numbers::pi / 2;
  p.omega = 1e4;
  EXPECT_NEAR(twolevel::i2_limits(p, Regime::kStrong), 8.0 / 27.0, 1e-6);
  p.efficiency = 0.5;
  EXPECT_NEAR(twolevel::i2_limits(p, Regime::kStrong), 2.0 / 27.0, 1e-6);
}

TEST(TwoLevel, QuantumFisherReference) {
  EXPECT_DOUBLE_EQ(twolevel::qfi_reference(1.0, 20.0), 80.0);
  EXPECT_DOUBLE_EQ(twolevel::qfi_reference(2.0, 10.0), 20.0);
  EXPECT_THROW(twolevel::qfi_reference(0.0, 1.0), InvalidArgument);
}
