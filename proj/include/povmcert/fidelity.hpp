#pragma once

// Fidelity of a POVM to an extremal target, maximized over rotations of the
// Bloch sphere, and sampled worst-case fidelity envelopes.

#include <optional>
#include <string>
#include <vector>

#include "povmcert/optimize.hpp"
#include "povmcert/qubit.hpp"
#include "povmcert/sampling.hpp"
#include "povmcert/witness.hpp"

namespace povmcert {

/// An extremal target measurement together with one representative outcome
/// permutation per class of labellings that no rotation connects.
struct TargetPovm {
  std::string name;
  Povm povm;
  std::vector<std::vector<int>> relabel_classes;

  /// Validates extremality and computes the relabel classes by brute force
  /// over all outcome permutations. Throws std::invalid_argument if the povm
  /// is invalid or not extremal with 3 or 4 outcomes.
  static TargetPovm from_povm(std::string name, Povm p);
};

/// Tetrahedron vectors with weights 1/4.
TargetPovm sic_target();
/// Trine vectors with weights 1/3.
TargetPovm trine_target();

struct FidelityResult {
  double fidelity = 0.0;
  Mat3 rotation = Mat3::Identity();
};

/// F = max_R 1/2 sum_i Tr(R[E_i] M_i) / Tr(M_i) over rotations R of the
/// Bloch sphere. With E_i = l_i(1 + n_i.s) and unit target vectors v_i this
/// is 1/2 (1 + max_R sum_i l_i v_i . R n_i), solved exactly by an SVD of
/// H = sum_i l_i n_i v_i^T. Throws std::invalid_argument on outcome-count
/// mismatch.
FidelityResult povm_fidelity(const Povm& e, const Povm& target);
FidelityResult povm_fidelity(const Povm& e, const TargetPovm& target);

/// `target` with outcome i relabelled to perm[i].
Povm permute_outcomes(const Povm& target, const std::vector<int>& perm);

/// Max of povm_fidelity over the target's relabel classes.
double best_fidelity_over_relabelings(const Povm& e, const TargetPovm& target);

struct SamplePoint {
  double witness_value = 0.0;
  double fidelity = 0.0;
  long povm_id = 0;
};

struct EnvelopeBin {
  double a_lo = 0.0;
  double a_hi = 0.0;
  double min_f = 1.0;
  long count = 0;
};

/// Per-bin minimum fidelity over witness-value bins [j w, (j+1) w).
class EnvelopeCurve {
public:
  explicit EnvelopeCurve(double bin_width = 0.002);

  static EnvelopeCurve from_points(const std::vector<SamplePoint>& points, double bin_width);
  /// Reassembles a curve from stored bins (ordered by a_lo after the call).
  static EnvelopeCurve from_bins(double bin_width, std::vector<EnvelopeBin> bins);

  void add(const SamplePoint& p);
  /// Associative merge; throws std::invalid_argument on differing widths.
  void merge(const EnvelopeCurve& other);

  double bin_width() const { return width_; }
  /// Nonempty bins in increasing a_lo order.
  std::vector<EnvelopeBin> bins() const;
  /// The bin containing value a, if it holds samples.
  std::optional<EnvelopeBin> lookup(double a) const;

private:
  long bin_index(double a) const;

  double width_;
  std::vector<std::pair<long, EnvelopeBin>> bins_;  // sorted by index
};

struct FidelityCurve {
  std::vector<SamplePoint> points;
  EnvelopeCurve envelope;
  SamplerStats sampler;
  long skipped = 0;
};

inline constexpr int kSampleRestarts = 8;

/// Draws n random extremal POVMs (for four-outcome targets, odd-indexed
/// samples are three-outcome POVMs padded with a zero effect at a random
/// position), maximizes the witness over preparations and binaries with the
/// povm fixed (kSampleRestarts restarts per sample, cfg.max_iters and
/// cfg.tol per restart), and records (A, F). Sample i uses rng.child(i); the
/// result is independent of cfg.threads. Throws std::invalid_argument on bad
/// arguments.
FidelityCurve sample_fidelity_curve(const WitnessSpec& w, const TargetPovm& target, long n_samples,
                                    double bin_width, const RngStream& rng,
                                    const OptimizerConfig& cfg);

}  // namespace povmcert
