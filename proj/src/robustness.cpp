#include "povmcert/robustness.hpp"

#include <cmath>
#include <stdexcept>

namespace povmcert {

double a_rand(const WitnessSpec& w) {
  double s = 0.0;
  for (const auto& c : w.coefficients()) s += 0.5 * c.c;
  return s;
}

CriticalVisibility critical_visibility(double k, double bound, double a_q, double a_rand) {
  if (!std::isfinite(k) || !std::isfinite(bound) || !std::isfinite(a_q) || !std::isfinite(a_rand)) {
    throw std::invalid_argument("critical_visibility: non-finite input");
  }
  const double den = a_q - a_rand + k;
  if (!(den > 0.0)) throw std::invalid_argument("critical_visibility: denominator must be positive");
  CriticalVisibility out;
  out.value = (bound - a_rand + k) / den;
  if (out.value < 0.0) {
    out.value = 0.0;
    out.clamped = true;
  } else if (out.value > 1.0) {
    out.value = 1.0;
    out.clamped = true;
  }
  return out;
}

std::string to_string(VisibilityBound b) {
  return b == VisibilityBound::Projective ? "projective" : "three-outcome";
}

VisibilityBound parse_visibility_bound(const std::string& s) {
  if (s == "projective") return VisibilityBound::Projective;
  if (s == "three-outcome") return VisibilityBound::ThreeOutcome;
  throw std::invalid_argument("unknown bound kind '" + s + "' (expected projective or three-outcome)");
}

BoundResult visibility_bound(WitnessFamily family, VisibilityBound kind, double k,
                             const OptimizerConfig& cfg) {
  const WitnessSpec w = make_witness(family, k);
  if (kind == VisibilityBound::ThreeOutcome) return three_outcome_max(w, cfg);
  switch (family) {
    case WitnessFamily::Sic:
      return projective_bound_sic(k);
    case WitnessFamily::SymTrine:
      return projective_bound_symtrine(k);
    case WitnessFamily::Trine:
      return projective_bound_numeric(w, cfg);
  }
  throw std::invalid_argument("unknown witness family");
}

std::vector<double> default_k_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 100; ++i) g.push_back(i / 100.0);
  return g;
}

std::vector<VisibilityResult> visibility_curve(WitnessFamily family, VisibilityBound kind,
                                               const std::vector<double>& k_grid,
                                               const OptimizerConfig& cfg) {
  if (k_grid.empty()) throw std::invalid_argument("k grid is empty");
  for (double k : k_grid) {
    if (!std::isfinite(k) || k < 0.0) throw std::invalid_argument("k grid values must be >= 0");
  }
  std::vector<VisibilityResult> out;
  out.reserve(k_grid.size());
  for (double k : k_grid) {
    const WitnessSpec w = make_witness(family, k);
    VisibilityResult r;
    r.k = k;
    r.bound_kind = kind;
    r.bound_value = visibility_bound(family, kind, k, cfg).value;
    r.a_rand = a_rand(w);
    r.a_q = w.quantum_max();
    const CriticalVisibility v = critical_visibility(k, r.bound_value, r.a_q, r.a_rand);
    r.v_crit = v.value;
    r.clamped = v.clamped;
    out.push_back(r);
  }
  return out;
}

}  // namespace povmcert
