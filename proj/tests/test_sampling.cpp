#include <gtest/gtest.h>

#include <cmath>

#include "povmcert/sampling.hpp"

using namespace povmcert;

TEST(RngStreamTest, SameIdentifierSameSequence) {
  RngStream a(42, 3);
  RngStream b(42, 3);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(RngStreamTest, DistinctStreamsAndChildrenDiffer) {
  RngStream a(42, 3);
  RngStream b(42, 4);
  RngStream c(43, 3);
  const auto va = a.next_u64();
  EXPECT_NE(va, b.next_u64());
  EXPECT_NE(va, c.next_u64());
  const RngStream root(42, 3);
  RngStream c0 = root.child(0);
  RngStream c1 = root.child(1);
  EXPECT_NE(c0.next_u64(), c1.next_u64());
  EXPECT_EQ(root.child(5).path(), (std::vector<std::uint64_t>{42, 3, 5}));
  EXPECT_EQ(root.seed(), 42u);
}

TEST(RngStreamTest, ChildIndependentOfParentState) {
  RngStream p(1, 0);
  RngStream before = p.child(2);
  p.next_u64();
  RngStream after = p.child(2);
  EXPECT_EQ(before.next_u64(), after.next_u64());
}

TEST(RngStreamTest, IndexRange) {
  RngStream r(1, 1);
  std::vector<int> hits(4, 0);
  for (int i = 0; i < 4000; ++i) ++hits[r.index(4)];
  for (int h : hits) EXPECT_GT(h, 800);
  EXPECT_THROW(r.index(0), std::invalid_argument);
}

TEST(RandomUnitVector, UnitAndCentered) {
  RngStream r(9, 0);
  Vec3 mean = Vec3::Zero();
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const Vec3 v = random_unit_vector(r).vec();
    EXPECT_NEAR(v.norm(), 1.0, 1e-12);
    mean += v / n;
  }
  EXPECT_LE(mean.norm(), 0.03);
}

TEST(RandomExtremalPovm, FourOutcomeValidAndExtremal) {
  RngStream r(7, 0);
  for (int i = 0; i < 500; ++i) {
    const Povm p = random_extremal_povm(4, r);
    ASSERT_EQ(p.size(), 4u);
    EXPECT_TRUE(validate_povm(p).ok());
    EXPECT_EQ(classify_extremal(p), ExtremalClass::Extremal4);
    for (const auto& e : p.elements) EXPECT_GT(e.weight, kMinSampledWeight);
  }
}

TEST(RandomExtremalPovm, ThreeOutcomeCoplanar) {
  RngStream r(7, 1);
  for (int i = 0; i < 500; ++i) {
    const Povm p = random_extremal_povm(3, r);
    EXPECT_TRUE(validate_povm(p).ok());
    EXPECT_EQ(classify_extremal(p), ExtremalClass::Extremal3);
    EXPECT_NEAR(triple_product(p[0].bloch.vec(), p[1].bloch.vec(), p[2].bloch.vec()), 0.0, 1e-10);
  }
}

TEST(RandomExtremalPovm, BadOutcomeCount) {
  RngStream r(7, 2);
  EXPECT_THROW(random_extremal_povm(2, r), std::invalid_argument);
  EXPECT_THROW(random_extremal_povm(5, r), std::invalid_argument);
}

TEST(RandomExtremalPovm, AcceptanceRateRecorded) {
  RngStream r(7, 3);
  SamplerStats stats;
  while (stats.attempts < 10000) random_extremal_povm(4, r, &stats);
  EXPECT_GT(stats.acceptance_rate(), 0.0);
  EXPECT_LE(stats.acceptance_rate(), 1.0);
  RecordProperty("acceptance_rate_O4", std::to_string(stats.acceptance_rate()));
}

TEST(RandomExtremalPovm, MeanWeightIsOneQuarter) {
  RngStream r(7, 4);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += random_extremal_povm(4, r)[i % 4].weight;
  EXPECT_NEAR(sum / n, 0.25, 0.01);
}

TEST(RandomUnitary, IdentityAndOrthogonality) {
  AxisAngle id;
  EXPECT_TRUE(id.matrix().isApprox(Mat3::Identity()));
  RngStream r(3, 0);
  for (int i = 0; i < 100; ++i) {
    const Mat3 m = random_unitary(r).matrix();
    EXPECT_LE((m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(m.determinant(), 1.0, 1e-12);
  }
}

TEST(RandomUnitary, HaarMeanVanishes) {
  RngStream r(3, 1);
  Mat3 mean = Mat3::Zero();
  const int n = 100000;
  for (int i = 0; i < n; ++i) mean += random_unitary(r).matrix() / n;
  EXPECT_LE(mean.cwiseAbs().maxCoeff(), 0.01);
}
