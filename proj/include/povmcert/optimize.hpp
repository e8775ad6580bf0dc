#pragma once

// See-saw maximization of witnesses and the projective / three-outcome
// bounds built on it.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "povmcert/qubit.hpp"
#include "povmcert/sampling.hpp"
#include "povmcert/witness.hpp"

namespace povmcert {

struct OptimizerConfig {
  int restarts = 32;
  int max_iters = 500;
  double tol = 1e-10;
  std::uint64_t seed = 1;
  int threads = 1;

  /// Throws std::invalid_argument unless restarts >= 1, max_iters >= 1,
  /// tol > 0 and threads >= 1.
  void check() const;
};

enum class BoundKind { ProjectiveClosedForm, ProjectiveNumeric, ThreeOutcomeNumeric, QuantumSeesaw };

std::string to_string(BoundKind k);
BoundKind parse_bound_kind(const std::string& s);

struct OptimizerDiagnostics {
  int restarts = 0;
  /// Restarts whose value change fell below the tolerance before max_iters.
  int converged_restarts = 0;
  /// Iterations and final value change of the winning restart.
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

/// Value reached by one restricted povm assignment (projective pair or
/// position of the zero effect).
struct AssignmentValue {
  std::string label;
  double value = 0.0;
};

struct BoundResult {
  BoundKind kind = BoundKind::QuantumSeesaw;
  double value = 0.0;
  double k = 0.0;
  /// True when the value is the best strategy found rather than a proven bound.
  bool heuristic = true;
  std::optional<Strategy> argmax;
  /// Maximizer of the one-dimensional closed-form bound.
  std::optional<double> argmax_x;
  OptimizerDiagnostics diagnostics;
  std::vector<AssignmentValue> assignments;
};

/// Restriction on the povm setting during the see-saw.
struct PovmConstraint {
  enum class Mode { General, Pair, Zero, Fixed };

  Mode mode = Mode::General;
  int first = -1;   // Pair: outcome i; Zero: the zero outcome
  int second = -1;  // Pair: outcome j
  std::optional<Povm> fixed;

  static PovmConstraint general() { return {}; }
  static PovmConstraint pair(int i, int j) { return {Mode::Pair, i, j, std::nullopt}; }
  static PovmConstraint zero(int z) { return {Mode::Zero, z, -1, std::nullopt}; }
  static PovmConstraint fixed_povm(Povm p) { return {Mode::Fixed, -1, -1, std::move(p)}; }
};

/// Axis of the rank-one projector maximizing Tr(M^0 W): the top eigenvector
/// of W. A degenerate W yields the lexicographically smallest axis (-1,0,0).
/// Throws std::invalid_argument on non-Hermitian input.
Observable optimal_binary_observable(const Mat2& w);

/// Pure state maximizing Tr(rho L). Same tie-break and errors as above.
QubitState optimal_preparation(const Mat2& l);

/// Smallest ball enclosing up to four points, with barycentric weights of
/// the centre over the points (zero for points off the sphere).
struct EnclosingBall {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
  std::vector<double> weights;
};

/// Throws std::invalid_argument for an empty or >4-point input.
EnclosingBall min_enclosing_ball(const std::vector<Vec3>& points);

/// Exact minimizer of sum_{x<O} Tr(rho_x E_x) over O-outcome POVMs.
/// The minimum is 1 - R with R the radius of the smallest ball enclosing the
/// preparation Bloch vectors m_0..m_{O-1}; the optimal effects point from
/// each touching m_x towards the ball centre with barycentric weights.
/// `preps` may be longer than O; only the first O are used.
Povm optimal_penalty_povm(const std::vector<QubitState>& preps, int outcomes);

/// As above with the povm restricted by `c` (Pair: rank-one projectors on
/// outcomes i, j; Zero: outcome z forced to 0; Fixed: returns c.fixed).
Povm optimal_penalty_povm(const std::vector<QubitState>& preps, int outcomes,
                          const PovmConstraint& c);

/// sum_{x<O} Tr(rho_x E_x).
double penalty_sum(const std::vector<QubitState>& preps, const Povm& povm);

/// Preparations and binary axes drawn uniformly on the sphere; the povm is
/// the optimal penalty povm of those preparations.
Strategy random_strategy(const Scenario& s, RngStream& rng);

struct SeesawRun {
  Strategy strategy;
  double value = 0.0;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

/// One see-saw pass sequence from `init`: binaries, then povm (respecting
/// `c`), then preparations, each step solved exactly, until the value
/// changes by less than `tol` or `max_iters` is reached. When `trace` is
/// given the value after every iteration is appended.
SeesawRun seesaw_run(const WitnessSpec& w, Strategy init, const PovmConstraint& c, int max_iters,
                     double tol, std::vector<double>* trace = nullptr);

/// Alternating exact maximization over binaries, povm and preparations.
/// Best over cfg.restarts seeded restarts; kind QuantumSeesaw.
BoundResult seesaw_maximize(const WitnessSpec& w, const OptimizerConfig& cfg,
                            const PovmConstraint& c = PovmConstraint::general());

/// Largest witness value reachable with the povm setting fixed to `povm`.
BoundResult maximize_given_povm(const WitnessSpec& w, const Povm& povm, const OptimizerConfig& cfg);

/// Closed-form projective bound of the SIC witness maximized over x in [-1,1].
/// Throws std::invalid_argument for k < 0.
BoundResult projective_bound_sic(double k);
/// Closed-form projective bound of the symmetric trine witness.
BoundResult projective_bound_symtrine(double k);

/// The one-dimensional functions maximized by the two closed-form bounds.
double sic_projective_objective(double k, double x);
double symtrine_projective_objective(double k, double x);

/// Best strategy found over every assignment of two povm outcomes to a
/// rank-one projective measurement (other outcomes zero).
BoundResult projective_bound_numeric(const WitnessSpec& w, const OptimizerConfig& cfg);

/// Best strategy found with at most three nonzero povm outcomes. Throws
/// std::invalid_argument unless the povm setting has four outcomes.
BoundResult three_outcome_max(const WitnessSpec& w, const OptimizerConfig& cfg);

/// Golden-section maximization of f over [lo, hi] after scanning
/// `subintervals` uniform cells for local maxima. Returns the argmax.
double maximize_1d(const std::function<double(double)>& f, double lo, double hi,
                   int subintervals = 64, double tol = 1e-10);

}  // namespace povmcert
