#pragma once

// Critical visibility of depolarized preparations for violating a bound,
// and its dependence on the penalty weight k.

#include <string>
#include <vector>

#include "povmcert/optimize.hpp"
#include "povmcert/witness.hpp"

namespace povmcert {

/// Base (penalty-free) witness value with every preparation maximally
/// mixed, maximized over binary observables. Every binary outcome then has
/// probability 1/2 whatever the observable, so this is half the sum of the
/// base coefficients.
double a_rand(const WitnessSpec& w);

struct CriticalVisibility {
  double value = 0.0;
  bool clamped = false;
};

/// (bound - a_rand + k) / (a_q - a_rand + k), clamped to [0, 1] with the
/// clamp reported. Throws std::invalid_argument if the denominator is not
/// positive or an input is not finite.
CriticalVisibility critical_visibility(double k, double bound, double a_q, double a_rand);

enum class VisibilityBound { Projective, ThreeOutcome };

std::string to_string(VisibilityBound b);
VisibilityBound parse_visibility_bound(const std::string& s);

struct VisibilityResult {
  double k = 0.0;
  VisibilityBound bound_kind = VisibilityBound::Projective;
  double bound_value = 0.0;
  double a_rand = 0.0;
  double a_q = 0.0;
  double v_crit = 0.0;
  bool clamped = false;
};

/// The bound used for a family at penalty k: closed form for the SIC and
/// symmetric-trine projective bounds, otherwise the numeric search. Throws
/// std::invalid_argument for a three-outcome bound of a three-outcome family.
BoundResult visibility_bound(WitnessFamily family, VisibilityBound kind, double k,
                             const OptimizerConfig& cfg);

/// k = 0.01, 0.02, ..., 1.00.
std::vector<double> default_k_grid();

/// Throws std::invalid_argument on an empty grid or negative k.
std::vector<VisibilityResult> visibility_curve(WitnessFamily family, VisibilityBound kind,
                                               const std::vector<double>& k_grid,
                                               const OptimizerConfig& cfg);

}  // namespace povmcert
