#include "povmcert/witness.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace povmcert {

void Scenario::check() const {
  if (povm_outcomes != 3 && povm_outcomes != 4) {
    throw std::invalid_argument("povm setting must have 3 or 4 outcomes");
  }
  if (binary_settings < 1) {
    throw std::invalid_argument("scenario needs at least one binary setting");
  }
  if (n_preparations < povm_outcomes) {
    throw std::invalid_argument("scenario needs at least as many preparations as povm outcomes");
  }
}

std::string to_string(WitnessFamily f) {
  switch (f) {
    case WitnessFamily::Sic:
      return "sic";
    case WitnessFamily::Trine:
      return "trine";
    case WitnessFamily::SymTrine:
      return "sym-trine";
  }
  return "?";
}

WitnessFamily parse_family(const std::string& name) {
  if (name == "sic") return WitnessFamily::Sic;
  if (name == "trine") return WitnessFamily::Trine;
  if (name == "sym-trine") return WitnessFamily::SymTrine;
  throw std::invalid_argument("unknown witness '" + name + "' (expected sic, trine or sym-trine)");
}

WitnessSpec WitnessSpec::from_coefficients(std::string name, const Scenario& scenario,
                                           const std::vector<Coefficient>& coeffs, double k,
                                           double quantum_max) {
  scenario.check();
  if (!std::isfinite(k) || k < 0.0) {
    throw std::invalid_argument("penalty weight k must be finite and non-negative");
  }
  WitnessSpec w;
  w.name_ = std::move(name);
  w.scenario_ = scenario;
  w.k_ = k;
  w.quantum_max_ = quantum_max;
  w.coeffs_.assign(static_cast<std::size_t>(scenario.n_preparations) * scenario.binary_settings * 2,
                   0.0);
  for (const auto& c : coeffs) {
    if (c.x < 0 || c.x >= scenario.n_preparations || c.y < 0 || c.y >= scenario.binary_settings ||
        c.b < 0 || c.b > 1) {
      std::ostringstream os;
      os << "coefficient index (" << c.x << "," << c.y << "," << c.b << ") outside scenario";
      throw std::invalid_argument(os.str());
    }
    if (!std::isfinite(c.c)) throw std::invalid_argument("coefficient is not finite");
    w.coeffs_[w.index(c.x, c.y, c.b)] += c.c;
  }
  return w;
}

std::vector<Coefficient> WitnessSpec::coefficients() const {
  std::vector<Coefficient> out;
  for (int x = 0; x < scenario_.n_preparations; ++x)
    for (int y = 0; y < scenario_.binary_settings; ++y)
      for (int b = 0; b < 2; ++b)
        if (coeff(x, y, b) != 0.0) out.push_back({x, y, b, coeff(x, y, b)});
  return out;
}

WitnessSpec WitnessSpec::with_k(double k) const {
  if (!std::isfinite(k) || k < 0.0) {
    throw std::invalid_argument("penalty weight k must be finite and non-negative");
  }
  WitnessSpec w = *this;
  w.k_ = k;
  return w;
}

WitnessSpec sic_witness(double k) {
  static constexpr int S[4][3] = {{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 0}};
  std::vector<Coefficient> cs;
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 3; ++y) cs.push_back({x, y, S[x][y], 1.0 / 12.0});
  return WitnessSpec::from_coefficients("sic", Scenario{4, 3, 4}, cs, k,
                                        0.5 * (1.0 + 1.0 / std::sqrt(3.0)));
}

WitnessSpec trine_witness(double k) {
  const double s3 = std::sqrt(3.0);
  const double T[3][2] = {{1.0, s3}, {1.0, -s3}, {-1.0, 0.0}};
  std::vector<Coefficient> cs;
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 2; ++y) {
      if (T[x][y] == 0.0) continue;
      cs.push_back({x, y, 0, T[x][y]});
      cs.push_back({x, y, 1, -T[x][y]});
    }
  return WitnessSpec::from_coefficients("trine", Scenario{3, 2, 3}, cs, k, 5.0);
}

WitnessSpec sym_trine_witness(double k) {
  std::vector<Coefficient> cs;
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y) cs.push_back({x, y, x == y ? 1 : 0, 1.0 / 9.0});
  return WitnessSpec::from_coefficients("sym-trine", Scenario{3, 3, 3}, cs, k, 5.0 / 6.0);
}

WitnessSpec make_witness(WitnessFamily family, double k) {
  switch (family) {
    case WitnessFamily::Sic:
      return sic_witness(k);
    case WitnessFamily::Trine:
      return trine_witness(k);
    case WitnessFamily::SymTrine:
      return sym_trine_witness(k);
  }
  throw std::invalid_argument("unknown witness family");
}

ProbabilityTable::ProbabilityTable(const Scenario& s) : scenario_(s) {
  s.check();
  const std::size_t n = static_cast<std::size_t>(s.n_preparations) *
                        (2 * s.binary_settings + s.povm_outcomes);
  prob_.assign(n, 0.0);
  err_.assign(n, 0.0);
  totals_.assign(static_cast<std::size_t>(s.n_preparations) * (s.binary_settings + 1), -1.0);
}

std::size_t ProbabilityTable::row(int x, Setting y) const {
  if (x < 0 || x >= scenario_.n_preparations) throw std::out_of_range("preparation index");
  if (y.is_povm()) return static_cast<std::size_t>(scenario_.n_preparations) * scenario_.binary_settings + x;
  if (y.index() >= scenario_.binary_settings) throw std::out_of_range("setting index");
  return static_cast<std::size_t>(x) * scenario_.binary_settings + y.index();
}

std::size_t ProbabilityTable::cell(int x, Setting y, int b) const {
  if (b < 0 || b >= outcomes(y)) throw std::out_of_range("outcome index");
  const std::size_t r = row(x, y);
  const std::size_t binary_rows = static_cast<std::size_t>(scenario_.n_preparations) * scenario_.binary_settings;
  if (!y.is_povm()) return r * 2 + b;
  return binary_rows * 2 + (r - binary_rows) * scenario_.povm_outcomes + b;
}

void ProbabilityTable::set_stderr(int x, Setting y, int b, double v) {
  err_[cell(x, y, b)] = v;
  has_stderr_ = true;
}

std::optional<double> ProbabilityTable::row_total(int x, Setting y) const {
  const double n = totals_[row(x, y)];
  if (n < 0.0) return std::nullopt;
  return n;
}

void ProbabilityTable::set_row_total(int x, Setting y, double n) { totals_[row(x, y)] = n; }

void ProbabilityTable::check_normalized(double tol) const {
  auto check_row = [&](int x, Setting y) {
    double s = 0.0;
    for (int b = 0; b < outcomes(y); ++b) {
      const double v = p(x, y, b);
      if (!std::isfinite(v) || v < -tol || v > 1.0 + tol) {
        throw std::invalid_argument("probability outside [0,1]");
      }
      s += v;
    }
    if (std::abs(s - 1.0) > tol) {
      std::ostringstream os;
      os << "row x=" << x << " y=" << (y.is_povm() ? std::string("povm") : std::to_string(y.index()))
         << " sums to " << s;
      throw std::invalid_argument(os.str());
    }
  };
  for (int x = 0; x < scenario_.n_preparations; ++x) {
    for (int y = 0; y < scenario_.binary_settings; ++y) check_row(x, Setting::binary(y));
    check_row(x, Setting::povm());
  }
}

ProbabilityTable probability_table(const std::vector<QubitState>& preps,
                                   const std::vector<Observable>& binaries, const Povm& povm,
                                   const Scenario& scenario) {
  if (static_cast<int>(preps.size()) != scenario.n_preparations ||
      static_cast<int>(binaries.size()) != scenario.binary_settings ||
      static_cast<int>(povm.size()) != scenario.povm_outcomes) {
    throw std::invalid_argument("strategy shape does not match the scenario");
  }
  ProbabilityTable t(scenario);
  for (int x = 0; x < scenario.n_preparations; ++x) {
    const Vec3& m = preps[x].bloch.vec();
    for (int y = 0; y < scenario.binary_settings; ++y) {
      const double c = m.dot(binaries[y].axis());
      t.set_p(x, Setting::binary(y), 0, 0.5 * (1.0 + c));
      t.set_p(x, Setting::binary(y), 1, 0.5 * (1.0 - c));
    }
    for (int b = 0; b < scenario.povm_outcomes; ++b) {
      const auto& e = povm[b];
      t.set_p(x, Setting::povm(), b, e.weight * (1.0 + m.dot(e.bloch.vec())));
    }
  }
  return t;
}

ProbabilityTable probability_table(const Strategy& s, const Scenario& scenario) {
  return probability_table(s.preparations, s.binaries, s.povm, scenario);
}

namespace {

void require_match(const WitnessSpec& w, const ProbabilityTable& t) {
  if (!(w.scenario() == t.scenario())) {
    throw std::invalid_argument("probability table shape does not match the witness scenario");
  }
}

// First-order variance of sum_b alpha_b p_b for one row.
double row_variance(const ProbabilityTable& t, int x, Setting y, const std::vector<double>& alpha) {
  const int n_out = t.outcomes(y);
  if (auto total = t.row_total(x, y); total && *total > 0.0) {
    double mean = 0.0;
    for (int b = 0; b < n_out; ++b) mean += alpha[b] * t.p(x, y, b);
    double var = 0.0;
    for (int b = 0; b < n_out; ++b) {
      const double d = alpha[b] - mean;
      var += d * d * t.p(x, y, b) / *total;
    }
    return var;
  }
  double var = 0.0;
  for (int b = 0; b < n_out; ++b) {
    const double s = alpha[b] * t.stderr_of(x, y, b);
    var += s * s;
  }
  return var;
}

}  // namespace

double base_value(const WitnessSpec& w, const ProbabilityTable& t) {
  require_match(w, t);
  const auto& sc = w.scenario();
  double v = 0.0;
  for (int x = 0; x < sc.n_preparations; ++x)
    for (int y = 0; y < sc.binary_settings; ++y)
      for (int b = 0; b < 2; ++b) v += w.coeff(x, y, b) * t.p(x, Setting::binary(y), b);
  return v;
}

double penalty_mass(const WitnessSpec& w, const ProbabilityTable& t) {
  require_match(w, t);
  double v = 0.0;
  for (int x = 0; x < w.scenario().povm_outcomes; ++x) v += t.p(x, Setting::povm(), x);
  return v;
}

WitnessValue evaluate_witness(const WitnessSpec& w, const ProbabilityTable& t) {
  WitnessValue out;
  out.value = base_value(w, t) - w.k() * penalty_mass(w, t);

  const auto& sc = w.scenario();
  bool any_totals = false;
  for (int x = 0; x < sc.n_preparations && !any_totals; ++x) {
    any_totals = t.row_total(x, Setting::povm()).has_value();
    for (int y = 0; y < sc.binary_settings && !any_totals; ++y)
      any_totals = t.row_total(x, Setting::binary(y)).has_value();
  }
  if (!t.has_stderr() && !any_totals) return out;

  double var = 0.0;
  std::vector<double> alpha;
  for (int x = 0; x < sc.n_preparations; ++x) {
    for (int y = 0; y < sc.binary_settings; ++y) {
      alpha = {w.coeff(x, y, 0), w.coeff(x, y, 1)};
      var += row_variance(t, x, Setting::binary(y), alpha);
    }
    alpha.assign(sc.povm_outcomes, 0.0);
    if (x < sc.povm_outcomes) alpha[x] = -w.k();
    var += row_variance(t, x, Setting::povm(), alpha);
  }
  out.stderr = std::sqrt(var);
  return out;
}

double strategy_value(const WitnessSpec& w, const Strategy& s) {
  const auto& sc = w.scenario();
  double v = 0.0;
  for (int x = 0; x < sc.n_preparations; ++x) {
    const Vec3& m = s.preparations[x].bloch.vec();
    for (int y = 0; y < sc.binary_settings; ++y) {
      const double c = m.dot(s.binaries[y].axis());
      v += w.coeff(x, y, 0) * 0.5 * (1.0 + c) + w.coeff(x, y, 1) * 0.5 * (1.0 - c);
    }
    if (x < sc.povm_outcomes) {
      const auto& e = s.povm[x];
      v -= w.k() * e.weight * (1.0 + m.dot(e.bloch.vec()));
    }
  }
  return v;
}

std::vector<Vec3> sic_vectors() {
  const double s = 1.0 / std::sqrt(3.0);
  return {Vec3(s, s, s), Vec3(s, -s, -s), Vec3(-s, s, -s), Vec3(-s, -s, s)};
}

std::vector<Vec3> trine_vectors() {
  const double h = std::sqrt(3.0) / 2.0;
  return {Vec3(0.0, 0.0, -1.0), Vec3(-h, 0.0, 0.5), Vec3(h, 0.0, 0.5)};
}

namespace {

Strategy anti_aligned(const std::vector<Vec3>& preps, const std::vector<Vec3>& axes) {
  Strategy s;
  const double lambda = 1.0 / static_cast<double>(preps.size());
  for (const auto& m : preps) {
    s.preparations.push_back(QubitState::from_bloch(m));
    s.povm.elements.emplace_back(lambda, BlochVector(-m));
  }
  for (const auto& a : axes) s.binaries.emplace_back(a);
  return s;
}

}  // namespace

Strategy ideal_strategy(WitnessFamily family) {
  switch (family) {
    case WitnessFamily::Sic:
      return anti_aligned(sic_vectors(), {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()});
    case WitnessFamily::Trine: {
      const auto v = trine_vectors();
      return anti_aligned({v[2], v[1], v[0]}, {Vec3::UnitZ(), Vec3::UnitX()});
    }
    case WitnessFamily::SymTrine: {
      const auto v = trine_vectors();
      return anti_aligned(v, {-v[0], -v[1], -v[2]});
    }
  }
  throw std::invalid_argument("unknown witness family");
}

}  // namespace povmcert
