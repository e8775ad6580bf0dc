#include "povmcert/experiment.hpp"

#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "parallel.hpp"

namespace povmcert {

namespace {

constexpr double kDeg = M_PI / 180.0;
// FWHM = 2 sqrt(2 ln 2) sigma for a normal distribution.
const double kFwhmToSigma = 1.0 / (2.0 * std::sqrt(2.0 * std::log(2.0)));

Mat2 retarder(double theta, double retardance) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Mat2 r;
  r << c, -s, s, c;
  Mat2 d = Mat2::Zero();
  d(0, 0) = 1.0;
  d(1, 1) = std::exp(Complex(0.0, retardance));
  return r * d * r.transpose();
}

std::string setting_label(Setting y) {
  return y.is_povm() ? std::string("povm") : std::to_string(y.index());
}

void check_fits(const ExperimentConfig& cfg, const WitnessSpec& w) {
  cfg.check();
  const Scenario& s = w.scenario();
  if (static_cast<int>(cfg.preparations.size()) != s.n_preparations) {
    throw std::invalid_argument("config lists " + std::to_string(cfg.preparations.size()) +
                                " preparations but the witness needs " +
                                std::to_string(s.n_preparations));
  }
  if (cfg.binary_axes && static_cast<int>(cfg.binary_axes->size()) != s.binary_settings) {
    throw std::invalid_argument("config binary_axes does not match the witness settings");
  }
}

// Witness contribution of one (x, setting) row for preparation Bloch vector m.
double row_contribution(const WitnessSpec& w, const IdealMeasurements& ideal, int x, Setting y,
                        const Vec3& m) {
  if (!y.is_povm()) {
    const double c = m.dot(ideal.binaries[y.index()].axis());
    return w.coeff(x, y.index(), 0) * 0.5 * (1.0 + c) + w.coeff(x, y.index(), 1) * 0.5 * (1.0 - c);
  }
  if (x >= w.scenario().povm_outcomes) return 0.0;
  const auto& e = ideal.povm[x];
  return -w.k() * e.weight * (1.0 + m.dot(e.bloch.vec()));
}

}  // namespace

QubitState jones_preparation(double hwp_deg, double qwp_deg) {
  if (!std::isfinite(hwp_deg) || !std::isfinite(qwp_deg)) {
    throw std::invalid_argument("wave-plate angles must be finite");
  }
  const Eigen::Vector2cd h(1.0, 0.0);
  const Eigen::Vector2cd out = retarder(hwp_deg * kDeg, M_PI) * retarder(qwp_deg * kDeg, M_PI / 2.0) * h;
  const Complex a = out[0];
  const Complex b = out[1];
  const Complex ab = std::conj(a) * b;
  Vec3 r(2.0 * ab.real(), 2.0 * ab.imag(), std::norm(a) - std::norm(b));
  r /= r.norm();
  return QubitState::from_bloch(r);
}

ProbabilityTable ingest_counts(const std::vector<CountsRecord>& records, const Scenario& scenario) {
  scenario.check();
  ProbabilityTable t(scenario);
  // counts[(x, setting)] -> per-outcome counts; setting -1 is the povm
  std::map<std::pair<int, int>, std::vector<std::int64_t>> groups;
  std::map<std::pair<int, int>, std::vector<bool>> seen;
  for (const auto& r : records) {
    if (r.n < 0) throw std::invalid_argument("negative count");
    if (r.x < 0 || r.x >= scenario.n_preparations) throw std::invalid_argument("preparation index out of range");
    if (!r.y.is_povm() && r.y.index() >= scenario.binary_settings) {
      throw std::invalid_argument("setting index out of range");
    }
    const int n_out = t.outcomes(r.y);
    if (r.b < 0 || r.b >= n_out) throw std::invalid_argument("outcome index out of range");
    const auto key = std::make_pair(r.x, r.y.index());
    auto& g = groups[key];
    auto& s = seen[key];
    if (g.empty()) {
      g.assign(n_out, 0);
      s.assign(n_out, false);
    }
    if (s[r.b]) {
      throw std::invalid_argument("duplicate count for x=" + std::to_string(r.x) +
                                  " y=" + setting_label(r.y) + " b=" + std::to_string(r.b));
    }
    s[r.b] = true;
    g[r.b] = r.n;
  }

  auto fill = [&](int x, Setting y) {
    const auto it = groups.find({x, y.index()});
    if (it == groups.end()) {
      throw std::invalid_argument("missing counts for x=" + std::to_string(x) + " y=" + setting_label(y));
    }
    double total = 0.0;
    for (auto n : it->second) total += static_cast<double>(n);
    if (total <= 0.0) {
      throw std::invalid_argument("no counts for x=" + std::to_string(x) + " y=" + setting_label(y));
    }
    t.set_row_total(x, y, total);
    for (int b = 0; b < t.outcomes(y); ++b) {
      const double p = static_cast<double>(it->second[b]) / total;
      t.set_p(x, y, b, p);
      t.set_stderr(x, y, b, std::sqrt(p * (1.0 - p) / total));
    }
  };
  for (int x = 0; x < scenario.n_preparations; ++x) {
    for (int y = 0; y < scenario.binary_settings; ++y) fill(x, Setting::binary(y));
    fill(x, Setting::povm());
  }
  return t;
}

void ExperimentConfig::check() const {
  if (preparations.empty()) throw std::invalid_argument("config has no preparations");
  for (const auto& p : preparations) {
    if (!std::isfinite(p.hwp_deg) || !std::isfinite(p.qwp_deg)) {
      throw std::invalid_argument("wave-plate angles must be finite");
    }
  }
  for (double v : {visibilities.z, visibilities.x, visibilities.y}) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("visibilities must lie in [0, 1]");
  }
  if (!(budget > 0.0) || !std::isfinite(budget)) throw std::invalid_argument("budget must be positive");
  if (!(motor_fwhm_deg >= 0.0) || !std::isfinite(motor_fwhm_deg)) {
    throw std::invalid_argument("motor FWHM must be non-negative");
  }
  if (binary_axes) {
    for (const auto& a : *binary_axes) {
      if (!a.allFinite() || a.norm() < 1e-12) throw std::invalid_argument("binary axis must be nonzero");
    }
  }
}

std::vector<QubitState> nominal_preparations(const ExperimentConfig& cfg) {
  std::vector<QubitState> preps;
  for (const auto& p : cfg.preparations) preps.push_back(jones_preparation(p.hwp_deg, p.qwp_deg));
  return preps;
}

IdealMeasurements ideal_measurements(const ExperimentConfig& cfg, const WitnessSpec& w) {
  check_fits(cfg, w);
  const Scenario& s = w.scenario();
  const auto preps = nominal_preparations(cfg);
  IdealMeasurements m;
  if (cfg.binary_axes) {
    for (const auto& a : *cfg.binary_axes) m.binaries.emplace_back(a.normalized());
  } else {
    for (int y = 0; y < s.binary_settings; ++y) {
      Mat2 wy = Mat2::Zero();
      for (int x = 0; x < s.n_preparations; ++x) {
        wy += (w.coeff(x, y, 0) - w.coeff(x, y, 1)) * preps[x].density();
      }
      m.binaries.push_back(optimal_binary_observable(wy));
    }
  }
  m.povm = optimal_penalty_povm(preps, s.povm_outcomes);
  return m;
}

double axis_visibility(const Visibilities& v, const Vec3& a) {
  return v.x * a[0] * a[0] + v.y * a[1] * a[1] + v.z * a[2] * a[2];
}

double povm_visibility(const Visibilities& v) { return (v.x + v.y + v.z) / 3.0; }

ProbabilityTable simulated_probabilities(const ExperimentConfig& cfg, const WitnessSpec& w) {
  const IdealMeasurements ideal = ideal_measurements(cfg, w);
  const auto preps = nominal_preparations(cfg);
  const Scenario& s = w.scenario();
  ProbabilityTable t(s);
  for (int x = 0; x < s.n_preparations; ++x) {
    for (int y = 0; y < s.binary_settings; ++y) {
      const Vec3& a = ideal.binaries[y].axis();
      const Vec3 m = depolarize(preps[x], axis_visibility(cfg.visibilities, a)).bloch.vec();
      const double c = m.dot(a);
      t.set_p(x, Setting::binary(y), 0, 0.5 * (1.0 + c));
      t.set_p(x, Setting::binary(y), 1, 0.5 * (1.0 - c));
    }
    const Vec3 m = depolarize(preps[x], povm_visibility(cfg.visibilities)).bloch.vec();
    for (int b = 0; b < s.povm_outcomes; ++b) {
      const auto& e = ideal.povm[b];
      t.set_p(x, Setting::povm(), b, e.weight * (1.0 + m.dot(e.bloch.vec())));
    }
  }
  return t;
}

std::vector<CountsRecord> simulate_counts(const ExperimentConfig& cfg, const WitnessSpec& w,
                                          RngStream& rng) {
  const ProbabilityTable t = simulated_probabilities(cfg, w);
  const Scenario& s = w.scenario();
  std::vector<CountsRecord> out;
  auto draw = [&](int x, Setting y) {
    for (int b = 0; b < t.outcomes(y); ++b) {
      const double mean = cfg.budget * std::max(0.0, t.p(x, y, b));
      std::int64_t n = 0;
      if (mean > 0.0) {
        std::poisson_distribution<std::int64_t> d(mean);
        n = d(rng.engine());
      }
      out.push_back({x, y, b, n});
    }
  };
  for (int x = 0; x < s.n_preparations; ++x) {
    for (int y = 0; y < s.binary_settings; ++y) draw(x, Setting::binary(y));
    draw(x, Setting::povm());
  }
  return out;
}

double monte_carlo_systematic(const ExperimentConfig& cfg, const WitnessSpec& w, long runs,
                              const RngStream& rng, int threads) {
  if (runs < 100) throw std::invalid_argument("monte_carlo_systematic needs at least 100 runs");
  const IdealMeasurements ideal = ideal_measurements(cfg, w);
  const Scenario& s = w.scenario();
  const double sigma = cfg.motor_fwhm_deg * kFwhmToSigma;

  std::vector<Setting> settings;
  for (int y = 0; y < s.binary_settings; ++y) settings.push_back(Setting::binary(y));
  settings.push_back(Setting::povm());

  std::vector<double> values(runs);
  detail::parallel_for(static_cast<int>(runs), threads, [&](int r) {
    RngStream g = rng.child(static_cast<std::uint64_t>(r));
    double v = 0.0;
    for (int x = 0; x < s.n_preparations; ++x) {
      const auto& plate = cfg.preparations[x];
      for (Setting y : settings) {
        const double dh = sigma * g.normal();
        const double dq = sigma * g.normal();
        const Vec3 m = jones_preparation(plate.hwp_deg + dh, plate.qwp_deg + dq).bloch.vec();
        v += row_contribution(w, ideal, x, y, m);
      }
    }
    values[r] = v;
  });

  if (sigma == 0.0) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(runs);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(runs - 1));
}

WitnessReport certify(const ProbabilityTable& t, const WitnessSpec& w, const CertificationBounds& bounds,
                      const EnvelopeCurve* envelope, double syst_err) {
  if (!(syst_err >= 0.0) || !std::isfinite(syst_err)) {
    throw std::invalid_argument("systematic error must be non-negative");
  }
  auto check_bound = [&](const std::optional<BoundResult>& b, const char* what) {
    if (!b) throw std::invalid_argument(std::string("missing ") + what + " bound");
    if (std::abs(b->k - w.k()) > 1e-12) {
      std::ostringstream os;
      os << what << " bound was computed for k=" << b->k << ", witness has k=" << w.k();
      throw std::invalid_argument(os.str());
    }
  };
  check_bound(bounds.projective, "projective");
  const bool four = w.scenario().povm_outcomes == 4;
  if (four) check_bound(bounds.three_outcome, "three-outcome");

  const WitnessValue wv = evaluate_witness(w, t);
  WitnessReport r;
  r.witness = w.name();
  r.k = w.k();
  r.value = wv.value;
  r.stat_err = wv.stderr.value_or(0.0);
  r.syst_err = syst_err;
  r.projective_bound = bounds.projective->value;
  r.projective_heuristic = bounds.projective->heuristic;
  r.quantum_bound = w.quantum_max();
  const double low = r.value - r.stat_err - r.syst_err;
  r.non_projective_certified = low > r.projective_bound;
  if (four) {
    r.three_outcome_bound = bounds.three_outcome->value;
    r.three_outcome_heuristic = bounds.three_outcome->heuristic;
    r.genuine_four_outcome_certified = low > *r.three_outcome_bound;
  }
  if (envelope) {
    r.fidelity_bin = envelope->lookup(r.value);
    if (r.fidelity_bin) r.fidelity_estimate = r.fidelity_bin->min_f;
    r.fidelity_note = r.fidelity_bin ? "heuristic, sampling-based" : "no envelope samples in this bin";
  }
  return r;
}

}  // namespace povmcert
