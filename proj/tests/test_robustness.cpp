#include <gtest/gtest.h>

#include <cmath>

#include "oracle_values.hpp"
#include "povmcert/robustness.hpp"

using namespace povmcert;

namespace {
const double kSicMax = 0.5 * (1.0 + 1.0 / std::sqrt(3.0));
}

TEST(ARand, HalfForTheWitnessFamilies) {
  EXPECT_NEAR(a_rand(sic_witness(0.2)), 0.5, 1e-15);
  EXPECT_NEAR(a_rand(sym_trine_witness(0.0)), 0.5, 1e-15);
  // trine coefficients are antisymmetric in b, so the mixed state scores 0
  EXPECT_NEAR(a_rand(trine_witness(1.0)), 0.0, 1e-15);
}

TEST(CriticalVisibilityTest, Formula) {
  const auto cv = critical_visibility(0.2, oracle::kSicProjective02, kSicMax, 0.5);
  EXPECT_NEAR(cv.value, (oracle::kSicProjective02 - 0.3) / (kSicMax - 0.3), 1e-15);
  EXPECT_NEAR(cv.value, 0.970, 1e-3);
  EXPECT_FALSE(cv.clamped);
  EXPECT_NEAR(critical_visibility(0.2, oracle::kSicThreeOutcomeK02, kSicMax, 0.5).value, 0.990, 1e-3);
}

TEST(CriticalVisibilityTest, ClampAndErrors) {
  const auto hi = critical_visibility(0.0, 2.0, 1.0, 0.5);
  EXPECT_DOUBLE_EQ(hi.value, 1.0);
  EXPECT_TRUE(hi.clamped);
  const auto lo = critical_visibility(0.0, 0.1, 1.0, 0.5);
  EXPECT_DOUBLE_EQ(lo.value, 0.0);
  EXPECT_TRUE(lo.clamped);
  EXPECT_THROW(critical_visibility(0.0, 0.7, 0.5, 0.5), std::invalid_argument);
  EXPECT_THROW(critical_visibility(NAN, 0.7, 0.8, 0.5), std::invalid_argument);
}

TEST(VisibilityBoundTest, KindsAndErrors) {
  OptimizerConfig cfg;
  cfg.restarts = 4;
  EXPECT_EQ(visibility_bound(WitnessFamily::Sic, VisibilityBound::Projective, 0.2, cfg).kind,
            BoundKind::ProjectiveClosedForm);
  EXPECT_EQ(visibility_bound(WitnessFamily::SymTrine, VisibilityBound::Projective, 0.2, cfg).kind,
            BoundKind::ProjectiveClosedForm);
  EXPECT_EQ(visibility_bound(WitnessFamily::Trine, VisibilityBound::Projective, 1.0, cfg).kind,
            BoundKind::ProjectiveNumeric);
  EXPECT_THROW(visibility_bound(WitnessFamily::Trine, VisibilityBound::ThreeOutcome, 1.0, cfg),
               std::invalid_argument);
  EXPECT_EQ(parse_visibility_bound(to_string(VisibilityBound::ThreeOutcome)), VisibilityBound::ThreeOutcome);
  EXPECT_THROW(parse_visibility_bound("two-outcome"), std::invalid_argument);
}

TEST(VisibilityCurveTest, DefaultGrid) {
  const auto g = default_k_grid();
  ASSERT_EQ(g.size(), 100u);
  EXPECT_DOUBLE_EQ(g.front(), 0.01);
  EXPECT_DOUBLE_EQ(g.back(), 1.0);
}

TEST(VisibilityCurveTest, SicProjectiveMinimumNearOneFifth) {
  OptimizerConfig cfg;
  const auto curve = visibility_curve(WitnessFamily::Sic, VisibilityBound::Projective, default_k_grid(), cfg);
  ASSERT_EQ(curve.size(), 100u);
  std::size_t best = 0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    EXPECT_DOUBLE_EQ(curve[i].a_rand, 0.5);
    if (curve[i].v_crit < curve[best].v_crit) best = i;
  }
  EXPECT_NEAR(curve[best].k, 0.2, 0.02);
  EXPECT_THROW(visibility_curve(WitnessFamily::Sic, VisibilityBound::Projective, {}, cfg), std::invalid_argument);
  EXPECT_THROW(visibility_curve(WitnessFamily::Sic, VisibilityBound::Projective, {-0.1}, cfg),
               std::invalid_argument);
}
