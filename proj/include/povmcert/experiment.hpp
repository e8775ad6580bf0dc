#pragma once

// Count data, the wave-plate preparation model, simulated experiments,
// Monte Carlo systematic errors and certification reports.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "povmcert/fidelity.hpp"
#include "povmcert/optimize.hpp"
#include "povmcert/qubit.hpp"
#include "povmcert/sampling.hpp"
#include "povmcert/witness.hpp"

namespace povmcert {

/// Polarization state prepared from |H> by a quarter-wave plate at qwp_deg
/// followed by a half-wave plate at hwp_deg (fast axes from horizontal).
/// Bloch convention: z = |H|^2 - |V|^2, x + iy = 2 conj(a_H) a_V.
/// Throws std::invalid_argument on non-finite angles.
QubitState jones_preparation(double hwp_deg, double qwp_deg);

struct CountsRecord {
  int x = 0;
  Setting y = Setting::povm();
  int b = 0;
  std::int64_t n = 0;
};

/// p(b|x,y) = n_b / N per (x, y) group with first-order Poissonian errors
/// sqrt(p(1-p)/N); row totals are kept for correlated propagation. Throws
/// std::invalid_argument on a missing or empty group, negative counts,
/// duplicate cells or indices outside the scenario. Missing cells inside a
/// present group count as zero.
ProbabilityTable ingest_counts(const std::vector<CountsRecord>& records, const Scenario& scenario);

struct PlateSetting {
  double hwp_deg = 0.0;
  double qwp_deg = 0.0;
};

struct Visibilities {
  double z = 1.0;
  double x = 1.0;
  double y = 1.0;
};

struct ExperimentConfig {
  std::vector<PlateSetting> preparations;
  Visibilities visibilities;
  /// Expected counts per measured setting.
  double budget = 5e6;
  double motor_fwhm_deg = 0.02;
  /// Binary measurement axes; derived from the witness when absent.
  std::optional<std::vector<Vec3>> binary_axes;

  /// Throws std::invalid_argument on non-finite angles, visibilities outside
  /// [0,1] or a non-positive budget.
  void check() const;
};

/// Ideal measurements of the simulated experiment: the given binary axes
/// (or the best response to the nominal preparations) and the optimal
/// penalty povm for the nominal preparations.
struct IdealMeasurements {
  std::vector<Observable> binaries;
  Povm povm;
};

std::vector<QubitState> nominal_preparations(const ExperimentConfig& cfg);

/// Throws std::invalid_argument if cfg does not fit w's scenario.
IdealMeasurements ideal_measurements(const ExperimentConfig& cfg, const WitnessSpec& w);

/// Visibility applied to a binary measurement along `axis`:
/// v_x a_x^2 + v_y a_y^2 + v_z a_z^2.
double axis_visibility(const Visibilities& v, const Vec3& axis);
/// Visibility applied to the povm setting: mean of the three.
double povm_visibility(const Visibilities& v);

/// Exact outcome probabilities of the simulated experiment (the infinite
/// budget limit).
ProbabilityTable simulated_probabilities(const ExperimentConfig& cfg, const WitnessSpec& w);

/// Poissonian counts with mean budget * p for every cell, in (x, setting, b)
/// order with the povm setting after the binary settings.
std::vector<CountsRecord> simulate_counts(const ExperimentConfig& cfg, const WitnessSpec& w,
                                          RngStream& rng);

/// Standard deviation over `runs` of the noiseless witness value when every
/// (preparation, setting) cell is prepared with both plate angles perturbed
/// by independent normal draws with the configured FWHM. Measurements stay
/// at their ideal settings. Run r uses rng.child(r). Throws
/// std::invalid_argument for runs < 100.
double monte_carlo_systematic(const ExperimentConfig& cfg, const WitnessSpec& w, long runs,
                              const RngStream& rng, int threads = 1);

struct CertificationBounds {
  std::optional<BoundResult> projective;
  std::optional<BoundResult> three_outcome;
};

struct WitnessReport {
  std::string witness;
  double k = 0.0;
  double value = 0.0;
  double stat_err = 0.0;
  double syst_err = 0.0;
  double projective_bound = 0.0;
  bool projective_heuristic = false;
  std::optional<double> three_outcome_bound;
  bool three_outcome_heuristic = true;
  double quantum_bound = 0.0;
  bool non_projective_certified = false;
  /// Only meaningful for four-outcome povm settings; false otherwise.
  bool genuine_four_outcome_certified = false;
  std::optional<EnvelopeBin> fidelity_bin;
  std::optional<double> fidelity_estimate;
  std::string fidelity_note;
};

/// Evaluates the witness with its statistical error and compares
/// value - stat_err - syst_err with each bound. Throws std::invalid_argument
/// when the projective bound (or, for four-outcome settings, the
/// three-outcome bound) is missing or computed for another k.
WitnessReport certify(const ProbabilityTable& t, const WitnessSpec& w, const CertificationBounds& bounds,
                      const EnvelopeCurve* envelope, double syst_err);

}  // namespace povmcert
