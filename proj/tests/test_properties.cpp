#include <gtest/gtest.h>

#include <cmath>

#include "povmcert/fidelity.hpp"
#include "povmcert/optimize.hpp"

using namespace povmcert;

TEST(Properties, RandomPovmsSatisfyValidationAndExtremality) {
  RngStream rng(1001, 0);
  for (int i = 0; i < 10000; ++i) {
    const int outcomes = i % 2 == 0 ? 4 : 3;
    const Povm p = random_extremal_povm(outcomes, rng);
    ASSERT_TRUE(validate_povm(p).ok()) << "sample " << i;
    EXPECT_LE((povm_sum(p) - Mat2::Identity()).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_EQ(classify_extremal(p), outcomes == 4 ? ExtremalClass::Extremal4 : ExtremalClass::Extremal3);
    // random rotations keep validity and extremality
    const Povm q = rotate(p, random_unitary(rng).matrix());
    EXPECT_TRUE(validate_povm(q).ok());
    EXPECT_EQ(classify_extremal(q), classify_extremal(p));
  }
}

// The see-saw stops on a 1e-10 change of the witness value; at a smooth
// maximum the strategy itself is then only resolved to about its square root.
constexpr double kGramTol = 1e-4;

TEST(Properties, SeesawOptimumGramConditions) {
  OptimizerConfig cfg;
  cfg.restarts = 8;
  const auto sic = seesaw_maximize(sic_witness(0.2), cfg);
  ASSERT_TRUE(sic.argmax.has_value());
  const auto& sp = sic.argmax->preparations;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) EXPECT_NEAR(sp[i].bloch.vec().dot(sp[j].bloch.vec()), -1.0 / 3.0, kGramTol);
  for (int x = 0; x < 4; ++x) EXPECT_NEAR(sic.argmax->povm[x].bloch.vec().dot(sp[x].bloch.vec()), -1.0, kGramTol);

  for (const auto& w : {trine_witness(1.0), sym_trine_witness(0.5)}) {
    const auto r = seesaw_maximize(w, cfg);
    ASSERT_TRUE(r.argmax.has_value());
    const auto& tp = r.argmax->preparations;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) EXPECT_NEAR(tp[i].bloch.vec().dot(tp[j].bloch.vec()), -0.5, kGramTol) << w.name();
    const auto& povm = r.argmax->povm;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        EXPECT_NEAR(povm[i].bloch.vec().dot(povm[j].bloch.vec()), -0.5, kGramTol) << w.name();
  }
}

TEST(Properties, BoundOrderingChain) {
  OptimizerConfig cfg;
  cfg.restarts = 8;
  for (double k : {0.05, 0.2, 0.5, 1.0}) {
    const auto w = sic_witness(k);
    const double proj = projective_bound_sic(k).value;
    const double proj_num = projective_bound_numeric(w, cfg).value;
    const double three = three_outcome_max(w, cfg).value;
    const double quantum = seesaw_maximize(w, cfg).value;
    EXPECT_NEAR(proj_num, proj, 1e-6) << "k=" << k;
    EXPECT_LE(proj, three + 1e-6) << "k=" << k;
    EXPECT_LE(three, quantum + 1e-6) << "k=" << k;
  }
}

TEST(Properties, SeesawMonotoneForEveryConstraint) {
  RngStream rng(1002, 0);
  const auto w = sic_witness(0.5);
  for (const auto& c : {PovmConstraint::general(), PovmConstraint::pair(0, 2), PovmConstraint::zero(3)}) {
    for (int t = 0; t < 10; ++t) {
      std::vector<double> trace;
      seesaw_run(w, random_strategy(w.scenario(), rng), c, 300, 1e-13, &trace);
      for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_GE(trace[i], trace[i - 1] - 1e-12);
    }
  }
}

TEST(Properties, FidelityBoundedAndRotationInvariant) {
  RngStream rng(1003, 0);
  const auto target = sic_target();
  for (int i = 0; i < 1000; ++i) {
    const Povm e = random_extremal_povm(4, rng);
    const double f = best_fidelity_over_relabelings(e, target);
    EXPECT_LE(f, 1.0 + 1e-9);
    EXPECT_GE(f, 0.0);
    EXPECT_NEAR(best_fidelity_over_relabelings(rotate(e, random_unitary(rng).matrix()), target), f, 1e-9);
  }
}
