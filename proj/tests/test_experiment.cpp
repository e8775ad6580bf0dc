#include <gtest/gtest.h>

#include <cmath>

#include "oracle_values.hpp"
#include "povmcert/experiment.hpp"
#include "povmcert/io.hpp"

using namespace povmcert;

namespace {

ExperimentConfig load(const std::string& name) {
  return config_from_json(Json::parse(read_file(std::string(POVMCERT_CONFIG_DIR) + "/" + name)));
}

std::vector<CountsRecord> binary_row(int x, int y, std::int64_t n0, std::int64_t n1) {
  return {{x, Setting::binary(y), 0, n0}, {x, Setting::binary(y), 1, n1}};
}

// Counts covering a 3-preparation, 1-binary, 3-outcome scenario.
std::vector<CountsRecord> full_counts() {
  std::vector<CountsRecord> r;
  for (int x = 0; x < 3; ++x) {
    auto row = binary_row(x, 0, 3, 1);
    r.insert(r.end(), row.begin(), row.end());
    for (int b = 0; b < 3; ++b) r.push_back({x, Setting::povm(), b, 10});
  }
  return r;
}

}  // namespace

TEST(Jones, TableOnePreparation) {
  const Vec3 v = jones_preparation(20.07, 17.63).bloch.vec();
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(v[i], oracle::kJonesSic1[i], 1e-9);
}

TEST(Jones, HorizontalAndTrineStates) {
  EXPECT_LE((jones_preparation(0, 0).bloch.vec() - Vec3(0, 0, 1)).norm(), 1e-12);
  EXPECT_LE((jones_preparation(30, 0).bloch.vec() - Vec3(std::sqrt(3.0) / 2, 0, -0.5)).norm(), 1e-12);
  EXPECT_LE((jones_preparation(-30, 0).bloch.vec() - Vec3(-std::sqrt(3.0) / 2, 0, -0.5)).norm(), 1e-12);
  EXPECT_THROW(jones_preparation(NAN, 0), std::invalid_argument);
}

TEST(Jones, ConfiguredPreparationsFormTheIdealSets) {
  const auto sic = nominal_preparations(load("table1_sic.json"));
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      EXPECT_NEAR(sic[i].bloch.vec().dot(sic[j].bloch.vec()), -1.0 / 3.0, 2e-3);
  const auto tri = nominal_preparations(load("table2_trine.json"));
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(tri[i].bloch[1], 0.0, 1e-12);
    for (int j = i + 1; j < 3; ++j) EXPECT_NEAR(tri[i].bloch.vec().dot(tri[j].bloch.vec()), -0.5, 1e-12);
  }
}

TEST(Ingest, SingleRowProbabilityAndError) {
  const auto t = ingest_counts(full_counts(), Scenario{3, 1, 3});
  EXPECT_DOUBLE_EQ(t.p(0, Setting::binary(0), 0), 0.75);
  EXPECT_DOUBLE_EQ(t.p(0, Setting::binary(0), 1), 0.25);
  EXPECT_NEAR(t.stderr_of(0, Setting::binary(0), 0), oracle::kIngestStderr31, 1e-15);
  ASSERT_TRUE(t.row_total(0, Setting::binary(0)).has_value());
  EXPECT_DOUBLE_EQ(*t.row_total(0, Setting::binary(0)), 4.0);
  EXPECT_NEAR(t.p(1, Setting::povm(), 2), 1.0 / 3.0, 1e-15);
}

TEST(Ingest, Errors) {
  const Scenario s{3, 1, 3};
  auto missing = full_counts();
  missing.erase(missing.begin(), missing.begin() + 2);
  EXPECT_THROW(ingest_counts(missing, s), std::invalid_argument);

  auto empty = full_counts();
  empty[0].n = 0;
  empty[1].n = 0;
  EXPECT_THROW(ingest_counts(empty, s), std::invalid_argument);

  auto dup = full_counts();
  dup.push_back(dup[0]);
  EXPECT_THROW(ingest_counts(dup, s), std::invalid_argument);

  auto negative = full_counts();
  negative[0].n = -1;
  EXPECT_THROW(ingest_counts(negative, s), std::invalid_argument);

  auto out_of_range = full_counts();
  out_of_range.push_back({3, Setting::povm(), 0, 1});
  EXPECT_THROW(ingest_counts(out_of_range, s), std::invalid_argument);
}

TEST(ExperimentConfigTest, Check) {
  ExperimentConfig c = load("table1_sic.json");
  EXPECT_NO_THROW(c.check());
  c.visibilities.x = 1.2;
  EXPECT_THROW(c.check(), std::invalid_argument);
  c = load("table1_sic.json");
  c.budget = 0;
  EXPECT_THROW(c.check(), std::invalid_argument);
  EXPECT_THROW(ideal_measurements(load("table2_trine.json"), sic_witness(0.2)), std::invalid_argument);
}

TEST(Visibility, AxisAndPovm) {
  const Visibilities v{0.9, 0.8, 0.7};
  EXPECT_DOUBLE_EQ(axis_visibility(v, Vec3(1, 0, 0)), 0.8);
  EXPECT_DOUBLE_EQ(axis_visibility(v, Vec3(0, 0, 1)), 0.9);
  EXPECT_NEAR(povm_visibility(v), 0.8, 1e-15);
}

TEST(Simulation, PerfectConfigReachesQuantumMaximum) {
  ExperimentConfig c = load("table2_trine.json");
  c.visibilities = {1.0, 1.0, 1.0};
  const auto w = trine_witness(1.0);
  EXPECT_NEAR(evaluate_witness(w, simulated_probabilities(c, w)).value, 5.0, 1e-9);
}

TEST(Simulation, CountsAreReproducibleAndWellFormed) {
  const auto c = load("table1_sic.json");
  const auto w = sic_witness(0.2);
  RngStream a(4, 0);
  RngStream b(4, 0);
  const auto ra = simulate_counts(c, w, a);
  const auto rb = simulate_counts(c, w, b);
  ASSERT_EQ(ra.size(), rb.size());
  EXPECT_EQ(ra.size(), 4u * (3u * 2u + 4u));
  for (std::size_t i = 0; i < ra.size(); ++i) EXPECT_EQ(ra[i].n, rb[i].n);
  const auto t = ingest_counts(ra, w.scenario());
  const auto exact = evaluate_witness(w, simulated_probabilities(c, w)).value;
  const auto sim = evaluate_witness(w, t);
  ASSERT_TRUE(sim.stderr.has_value());
  EXPECT_NEAR(sim.value, exact, 5.0 * *sim.stderr);
}

TEST(MonteCarlo, DeterministicPositiveAndValidated) {
  const auto c = load("table2_trine.json");
  const auto w = trine_witness(1.0);
  const RngStream rng(8, 0);
  const double s1 = monte_carlo_systematic(c, w, 200, rng, 1);
  const double s2 = monte_carlo_systematic(c, w, 200, rng, 3);
  EXPECT_EQ(s1, s2);
  EXPECT_GT(s1, 0.0);
  EXPECT_THROW(monte_carlo_systematic(c, w, 99, rng), std::invalid_argument);
  ExperimentConfig still = c;
  still.motor_fwhm_deg = 0.0;
  EXPECT_EQ(monte_carlo_systematic(still, w, 100, rng), 0.0);
}

TEST(Certify, VerdictsAndErrors) {
  const auto w = sic_witness(0.2);
  const auto t = probability_table(ideal_strategy(WitnessFamily::Sic), w.scenario());
  CertificationBounds b;
  b.projective = projective_bound_sic(0.2);
  BoundResult three;
  three.kind = BoundKind::ThreeOutcomeNumeric;
  three.k = 0.2;
  three.value = oracle::kSicThreeOutcomeK02;
  EXPECT_THROW(certify(t, w, b, nullptr, 0.0), std::invalid_argument);
  b.three_outcome = three;
  const auto r = certify(t, w, b, nullptr, 0.0);
  EXPECT_TRUE(r.non_projective_certified);
  EXPECT_TRUE(r.genuine_four_outcome_certified);
  EXPECT_FALSE(r.projective_heuristic);
  EXPECT_FALSE(r.fidelity_estimate.has_value());

  // a systematic error larger than the gap removes the four-outcome verdict
  const auto loose = certify(t, w, b, nullptr, 0.01);
  EXPECT_TRUE(loose.non_projective_certified);
  EXPECT_FALSE(loose.genuine_four_outcome_certified);

  b.projective = projective_bound_sic(0.3);
  EXPECT_THROW(certify(t, w, b, nullptr, 0.0), std::invalid_argument);
}

TEST(Certify, EnvelopeLookup) {
  const auto w = trine_witness(1.0);
  const auto t = probability_table(ideal_strategy(WitnessFamily::Trine), w.scenario());
  CertificationBounds b;
  BoundResult p;
  p.kind = BoundKind::ProjectiveNumeric;
  p.k = 1.0;
  p.value = oracle::kTrinePair02K1;
  b.projective = p;
  EnvelopeCurve env(0.01);
  env.add({4.995, 0.99, 0});
  env.add({5.005, 0.99, 1});
  const auto r = certify(t, w, b, &env, 0.0);
  EXPECT_TRUE(r.non_projective_certified);
  EXPECT_FALSE(r.genuine_four_outcome_certified);
  ASSERT_TRUE(r.fidelity_estimate.has_value());
  EXPECT_DOUBLE_EQ(*r.fidelity_estimate, 0.99);
  EXPECT_FALSE(r.fidelity_note.empty());
}
