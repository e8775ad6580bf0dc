#pragma once

// Linear witnesses A = sum c_xyb p(b|x,y) - k sum_{x<O} p(b=x|x,povm) over
// prepare-and-measure statistics, and the probability tables they act on.

#include <optional>
#include <string>
#include <vector>

#include "povmcert/qubit.hpp"

namespace povmcert {

/// X preparations, Y binary settings and one O-outcome povm setting.
struct Scenario {
  int n_preparations = 0;
  int binary_settings = 0;
  int povm_outcomes = 0;

  /// Throws std::invalid_argument unless X >= O, O in {3,4}, Y >= 1.
  void check() const;
  bool operator==(const Scenario&) const = default;
};

struct Coefficient {
  int x = 0;
  int y = 0;
  int b = 0;
  double c = 0.0;
};

enum class WitnessFamily { Sic, Trine, SymTrine };

std::string to_string(WitnessFamily f);
/// Accepts "sic", "trine", "sym-trine". Throws std::invalid_argument.
WitnessFamily parse_family(const std::string& name);

class WitnessSpec {
public:
  /// Raw-tensor constructor. Coefficients on the same cell accumulate.
  static WitnessSpec from_coefficients(std::string name, const Scenario& scenario,
                                       const std::vector<Coefficient>& coeffs, double k,
                                       double quantum_max);

  const std::string& name() const { return name_; }
  const Scenario& scenario() const { return scenario_; }
  double k() const { return k_; }
  double quantum_max() const { return quantum_max_; }

  double coeff(int x, int y, int b) const { return coeffs_[index(x, y, b)]; }
  /// Nonzero coefficients in (x, y, b) order.
  std::vector<Coefficient> coefficients() const;

  /// Same base coefficients with a different penalty weight.
  WitnessSpec with_k(double k) const;

private:
  WitnessSpec() = default;
  std::size_t index(int x, int y, int b) const {
    return (static_cast<std::size_t>(x) * scenario_.binary_settings + y) * 2 + b;
  }

  std::string name_;
  Scenario scenario_;
  std::vector<double> coeffs_;
  double k_ = 0.0;
  double quantum_max_ = 0.0;
};

WitnessSpec sic_witness(double k);
WitnessSpec trine_witness(double k);
WitnessSpec sym_trine_witness(double k);
WitnessSpec make_witness(WitnessFamily family, double k);

/// Identifies one measurement setting: a binary setting index or the povm.
class Setting {
public:
  static Setting binary(int y) { return Setting(y); }
  static Setting povm() { return Setting(-1); }
  bool is_povm() const { return index_ < 0; }
  int index() const { return index_; }
  bool operator==(const Setting&) const = default;

private:
  explicit Setting(int i) : index_(i) {}
  int index_;
};

/// p(b|x,y) for every binary setting and the povm setting.
class ProbabilityTable {
public:
  explicit ProbabilityTable(const Scenario& s);

  const Scenario& scenario() const { return scenario_; }

  double p(int x, Setting y, int b) const { return prob_[cell(x, y, b)]; }
  void set_p(int x, Setting y, int b, double v) { prob_[cell(x, y, b)] = v; }

  bool has_stderr() const { return has_stderr_; }
  double stderr_of(int x, Setting y, int b) const { return err_[cell(x, y, b)]; }
  void set_stderr(int x, Setting y, int b, double v);

  /// Total counts behind the (x, y) row, when the table came from counts.
  /// Enables exact first-order propagation of the anticorrelated cells.
  std::optional<double> row_total(int x, Setting y) const;
  void set_row_total(int x, Setting y, double n);

  int outcomes(Setting y) const { return y.is_povm() ? scenario_.povm_outcomes : 2; }

  /// Throws std::invalid_argument if a row is out of [0,1] or does not sum
  /// to 1 within `tol`.
  void check_normalized(double tol = 1e-6) const;

private:
  std::size_t row(int x, Setting y) const;
  std::size_t cell(int x, Setting y, int b) const;

  Scenario scenario_;
  std::vector<double> prob_;
  std::vector<double> err_;
  std::vector<double> totals_;
  bool has_stderr_ = false;
};

/// Preparations, binary observables and the povm-setting measurement.
struct Strategy {
  std::vector<QubitState> preparations;
  std::vector<Observable> binaries;
  Povm povm;
};

/// p(b|x,y) = Tr(rho_x M_y^b). Throws std::invalid_argument on shape
/// mismatch with the scenario.
ProbabilityTable probability_table(const std::vector<QubitState>& preps,
                                   const std::vector<Observable>& binaries, const Povm& povm,
                                   const Scenario& scenario);
ProbabilityTable probability_table(const Strategy& s, const Scenario& scenario);

struct WitnessValue {
  double value = 0.0;
  std::optional<double> stderr;
};

/// Throws std::invalid_argument on scenario mismatch.
WitnessValue evaluate_witness(const WitnessSpec& w, const ProbabilityTable& t);

/// sum_xyb c_xyb p(b|x,y) only.
double base_value(const WitnessSpec& w, const ProbabilityTable& t);
/// sum_{x<O} p(b=x|x,povm) only.
double penalty_mass(const WitnessSpec& w, const ProbabilityTable& t);

/// Witness value of a strategy computed directly from Bloch vectors.
double strategy_value(const WitnessSpec& w, const Strategy& s);

/// Canonical strategies reaching the quantum maximum of each builder:
/// SIC: tetrahedron preparations with sigma_x, sigma_y, sigma_z;
/// trine: trine preparations with sigma_z, sigma_x; sym-trine: trine
/// preparations measured anti-aligned. The povm is anti-aligned with the
/// preparations in every case.
Strategy ideal_strategy(WitnessFamily family);

/// Bloch vectors v_1..v_4 of the reference SIC-POVM.
std::vector<Vec3> sic_vectors();
/// Bloch vectors v_1..v_3 of the reference trine-POVM.
std::vector<Vec3> trine_vectors();

}  // namespace povmcert
