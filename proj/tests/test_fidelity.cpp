#include <gtest/gtest.h>

#include <cmath>

#include "oracle_values.hpp"
#include "povmcert/fidelity.hpp"

using namespace povmcert;

namespace {

Povm projective_x() {
  Povm p;
  p.elements.emplace_back(0.5, BlochVector(1, 0, 0));
  p.elements.emplace_back(0.5, BlochVector(-1, 0, 0));
  p.elements.emplace_back(0.0, BlochVector());
  return p;
}

// Direct evaluation of 1/2 sum_i Tr(R[E_i] M_i) / Tr(M_i) for a fixed rotation.
double fidelity_at(const Povm& e, const Povm& target, const Mat3& r) {
  double f = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const PovmElement rotated(e[i].weight, BlochVector(r * e[i].bloch.vec()));
    const Mat2 m = povm_element_matrix(target[i]);
    f += (povm_element_matrix(rotated) * m).trace().real() / m.trace().real();
  }
  return 0.5 * f;
}

}  // namespace

TEST(Targets, SicAndTrine) {
  const auto sic = sic_target();
  EXPECT_TRUE(validate_povm(sic.povm).ok());
  EXPECT_EQ(classify_extremal(sic.povm), ExtremalClass::Extremal4);
  EXPECT_EQ(sic.relabel_classes.size(), 2u);
  const auto tri = trine_target();
  EXPECT_EQ(classify_extremal(tri.povm), ExtremalClass::Extremal3);
  EXPECT_EQ(tri.relabel_classes.size(), 1u);
}

TEST(Targets, GramConditions) {
  const auto s = sic_vectors();
  const auto t = trine_vectors();
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) EXPECT_NEAR(s[i].dot(s[j]), -1.0 / 3.0, 1e-12);
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) EXPECT_NEAR(t[i].dot(t[j]), -0.5, 1e-12);
}

TEST(Targets, RejectsNonExtremal) {
  EXPECT_THROW(TargetPovm::from_povm("pvm", projective_x()), std::invalid_argument);
}

TEST(PovmFidelity, SelfFidelityIsOne) {
  EXPECT_NEAR(povm_fidelity(sic_target().povm, sic_target()).fidelity, 1.0, 1e-9);
  EXPECT_NEAR(povm_fidelity(trine_target().povm, trine_target()).fidelity, 1.0, 1e-9);
}

TEST(PovmFidelity, RotationInvariance) {
  RngStream rng(21, 0);
  for (int i = 0; i < 20; ++i) {
    const Mat3 r = random_unitary(rng).matrix();
    EXPECT_NEAR(povm_fidelity(rotate(sic_target().povm, r), sic_target()).fidelity, 1.0, 1e-9);
    const Povm e = random_extremal_povm(4, rng);
    EXPECT_NEAR(povm_fidelity(rotate(e, r), sic_target()).fidelity, povm_fidelity(e, sic_target()).fidelity,
                1e-9);
  }
}

TEST(PovmFidelity, ProjectiveVersusTrine) {
  EXPECT_NEAR(povm_fidelity(projective_x(), trine_target()).fidelity, oracle::kProjectiveVsTrineFidelity, 1e-9);
  EXPECT_NEAR(best_fidelity_over_relabelings(projective_x(), trine_target()), (2.0 + std::sqrt(3.0)) / 4.0, 1e-9);
}

TEST(PovmFidelity, OutcomeMismatchThrows) {
  EXPECT_THROW(povm_fidelity(projective_x(), sic_target()), std::invalid_argument);
}

TEST(PovmFidelity, ReturnedRotationAchievesFidelity) {
  RngStream rng(22, 0);
  for (int i = 0; i < 20; ++i) {
    const Povm e = random_extremal_povm(4, rng);
    const auto r = povm_fidelity(e, sic_target());
    EXPECT_NEAR(r.rotation.determinant(), 1.0, 1e-12);
    EXPECT_NEAR(fidelity_at(e, sic_target().povm, r.rotation), r.fidelity, 1e-12);
  }
}

TEST(PovmFidelity, AgreesWithRandomRotationSearch) {
  RngStream rng(23, 0);
  for (int trial = 0; trial < 3; ++trial) {
    const Povm e = random_extremal_povm(4, rng);
    const double exact = povm_fidelity(e, sic_target()).fidelity;
    double best = 0.0;
    for (int i = 0; i < 100000; ++i)
      best = std::max(best, fidelity_at(e, sic_target().povm, random_unitary(rng).matrix()));
    EXPECT_LE(best, exact + 1e-12);
    EXPECT_GE(best, exact - 2e-3);
  }
}

TEST(Relabeling, MirroredSicReachesOne) {
  Povm mirrored;
  for (const auto& v : sic_vectors()) mirrored.elements.emplace_back(0.25, BlochVector(-v));
  EXPECT_LT(povm_fidelity(mirrored, sic_target()).fidelity, 1.0 - 1e-3);
  EXPECT_NEAR(best_fidelity_over_relabelings(mirrored, sic_target()), 1.0, 1e-9);
}

TEST(Relabeling, EveryTrinePermutationIsARotation) {
  std::vector<int> perm{0, 1, 2};
  do {
    EXPECT_NEAR(povm_fidelity(permute_outcomes(trine_target().povm, perm), trine_target()).fidelity, 1.0, 1e-9);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST(Relabeling, FidelityOneOnlyForTargetUpToSymmetry) {
  RngStream rng(24, 0);
  for (int i = 0; i < 200; ++i)
    EXPECT_LT(best_fidelity_over_relabelings(random_extremal_povm(4, rng), sic_target()), 1.0 - 1e-6);
}

TEST(Envelope, BinsAndLookup) {
  EnvelopeCurve c(0.01);
  c.add({0.505, 0.9, 0});
  c.add({0.507, 0.8, 1});
  c.add({0.512, 0.95, 2});
  const auto bins = c.bins();
  ASSERT_EQ(bins.size(), 2u);
  EXPECT_NEAR(bins[0].a_lo, 0.50, 1e-12);
  EXPECT_DOUBLE_EQ(bins[0].min_f, 0.8);
  EXPECT_EQ(bins[0].count, 2);
  ASSERT_TRUE(c.lookup(0.5099).has_value());
  EXPECT_FALSE(c.lookup(0.53).has_value());
  EXPECT_THROW(EnvelopeCurve(0.0), std::invalid_argument);
}

TEST(Envelope, MergeIsOrderIndependent) {
  std::vector<SamplePoint> pts;
  RngStream rng(25, 0);
  for (long i = 0; i < 300; ++i) pts.push_back({rng.uniform(), rng.uniform(), i});
  const auto all = EnvelopeCurve::from_points(pts, 0.05);
  EnvelopeCurve a = EnvelopeCurve::from_points({pts.begin(), pts.begin() + 100}, 0.05);
  EnvelopeCurve b = EnvelopeCurve::from_points({pts.begin() + 100, pts.end()}, 0.05);
  EnvelopeCurve ab = a;
  ab.merge(b);
  EnvelopeCurve ba = b;
  ba.merge(a);
  ASSERT_EQ(ab.bins().size(), all.bins().size());
  for (std::size_t i = 0; i < all.bins().size(); ++i) {
    EXPECT_EQ(ab.bins()[i].min_f, all.bins()[i].min_f);
    EXPECT_EQ(ba.bins()[i].min_f, all.bins()[i].min_f);
    EXPECT_EQ(ab.bins()[i].count, all.bins()[i].count);
  }
  EXPECT_THROW(ab.merge(EnvelopeCurve(0.1)), std::invalid_argument);
}

TEST(SampleCurve, PointsAreConsistentAndDeterministic) {
  OptimizerConfig cfg;
  cfg.threads = 1;
  const RngStream rng(31, 0);
  const auto w = trine_witness(1.0);
  const auto c1 = sample_fidelity_curve(w, trine_target(), 40, 0.01, rng, cfg);
  cfg.threads = 3;
  const auto c2 = sample_fidelity_curve(w, trine_target(), 40, 0.01, rng, cfg);
  ASSERT_EQ(c1.points.size(), c2.points.size());
  for (std::size_t i = 0; i < c1.points.size(); ++i) {
    EXPECT_EQ(c1.points[i].witness_value, c2.points[i].witness_value);
    EXPECT_EQ(c1.points[i].fidelity, c2.points[i].fidelity);
    EXPECT_LE(c1.points[i].fidelity, 1.0 + 1e-9);
    EXPECT_LE(c1.points[i].witness_value, 5.0 + 1e-9);
  }
  for (const auto& p : c1.points) {
    const auto bin = c1.envelope.lookup(p.witness_value);
    ASSERT_TRUE(bin.has_value());
    EXPECT_LE(bin->min_f, p.fidelity);
  }
}

TEST(SampleCurve, IdealSicSamplePoint) {
  OptimizerConfig cfg;
  cfg.restarts = 8;
  const auto r = maximize_given_povm(sic_witness(0.2), sic_target().povm, cfg);
  EXPECT_NEAR(r.value, 0.5 * (1.0 + 1.0 / std::sqrt(3.0)), 1e-8);
  EXPECT_NEAR(best_fidelity_over_relabelings(sic_target().povm, sic_target()), 1.0, 1e-12);
}

TEST(SampleCurve, RejectsBadArguments) {
  OptimizerConfig cfg;
  const RngStream rng(1, 0);
  EXPECT_THROW(sample_fidelity_curve(sic_witness(0.2), trine_target(), 10, 0.01, rng, cfg), std::invalid_argument);
  EXPECT_THROW(sample_fidelity_curve(sic_witness(0.2), sic_target(), 0, 0.01, rng, cfg), std::invalid_argument);
}
