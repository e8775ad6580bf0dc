#include "povmcert/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "parallel.hpp"

namespace povmcert {

namespace {

constexpr double kRelabelTol = 1e-9;

Povm uniform_povm(const std::vector<Vec3>& dirs) {
  Povm p;
  const double lambda = 1.0 / static_cast<double>(dirs.size());
  for (const auto& v : dirs) p.elements.emplace_back(lambda, BlochVector(v));
  return p;
}

bool same_weights(const Povm& a, const Povm& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i].weight - b[i].weight) > kRelabelTol) return false;
  return true;
}

}  // namespace

TargetPovm TargetPovm::from_povm(std::string name, Povm p) {
  if (!validate_povm(p).ok()) throw std::invalid_argument("target povm is not a valid POVM");
  const ExtremalClass cls = classify_extremal(p);
  if (cls != ExtremalClass::Extremal3 && cls != ExtremalClass::Extremal4) {
    throw std::invalid_argument("target povm must be extremal with 3 or 4 outcomes");
  }
  TargetPovm t;
  t.name = std::move(name);
  t.povm = std::move(p);

  std::vector<int> perm(t.povm.size());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    const Povm candidate = permute_outcomes(t.povm, perm);
    bool known = false;
    for (const auto& rep : t.relabel_classes) {
      const Povm r = permute_outcomes(t.povm, rep);
      if (same_weights(candidate, r) && povm_fidelity(candidate, r).fidelity >= 1.0 - kRelabelTol) {
        known = true;
        break;
      }
    }
    if (!known) t.relabel_classes.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return t;
}

TargetPovm sic_target() { return TargetPovm::from_povm("sic", uniform_povm(sic_vectors())); }

TargetPovm trine_target() { return TargetPovm::from_povm("trine", uniform_povm(trine_vectors())); }

FidelityResult povm_fidelity(const Povm& e, const Povm& target) {
  if (e.size() != target.size()) {
    throw std::invalid_argument("povm_fidelity: outcome counts differ");
  }
  Mat3 h = Mat3::Zero();
  for (std::size_t i = 0; i < e.size(); ++i) {
    const Vec3& v = target[i].bloch.vec();
    const double vn = v.norm();
    if (vn < 1e-12) throw std::invalid_argument("povm_fidelity: target element has no Bloch direction");
    h += e[i].weight * e[i].bloch.vec() * (v / vn).transpose();
  }
  // max_R tr(R H): with H = U S V^T the optimum is R = V D U^T,
  // D = diag(1, 1, det(V U^T)).
  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3& u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  Mat3 d = Mat3::Identity();
  d(2, 2) = (v * u.transpose()).determinant() < 0.0 ? -1.0 : 1.0;

  FidelityResult out;
  out.rotation = v * d * u.transpose();
  const Vec3 s = svd.singularValues();
  double weight_sum = 0.0;
  for (const auto& el : e.elements) weight_sum += el.weight;
  out.fidelity = 0.5 * (weight_sum + s[0] + s[1] + d(2, 2) * s[2]);
  return out;
}

FidelityResult povm_fidelity(const Povm& e, const TargetPovm& target) {
  return povm_fidelity(e, target.povm);
}

Povm permute_outcomes(const Povm& target, const std::vector<int>& perm) {
  if (perm.size() != target.size()) throw std::invalid_argument("permutation size mismatch");
  Povm out;
  for (int i : perm) out.elements.push_back(target[i]);
  return out;
}

double best_fidelity_over_relabelings(const Povm& e, const TargetPovm& target) {
  double best = -1.0;
  for (const auto& perm : target.relabel_classes) {
    best = std::max(best, povm_fidelity(e, permute_outcomes(target.povm, perm)).fidelity);
  }
  return best;
}

EnvelopeCurve::EnvelopeCurve(double bin_width) : width_(bin_width) {
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) {
    throw std::invalid_argument("bin width must be positive");
  }
}

EnvelopeCurve EnvelopeCurve::from_points(const std::vector<SamplePoint>& points, double bin_width) {
  EnvelopeCurve c(bin_width);
  for (const auto& p : points) c.add(p);
  return c;
}

EnvelopeCurve EnvelopeCurve::from_bins(double bin_width, std::vector<EnvelopeBin> bins) {
  EnvelopeCurve c(bin_width);
  for (const auto& b : bins) {
    const long j = c.bin_index(0.5 * (b.a_lo + b.a_hi));
    auto it = std::lower_bound(c.bins_.begin(), c.bins_.end(), j,
                               [](const auto& e, long key) { return e.first < key; });
    if (it != c.bins_.end() && it->first == j) throw std::invalid_argument("duplicate envelope bin");
    c.bins_.insert(it, {j, b});
  }
  return c;
}

long EnvelopeCurve::bin_index(double a) const { return static_cast<long>(std::floor(a / width_)); }

void EnvelopeCurve::add(const SamplePoint& p) {
  const long j = bin_index(p.witness_value);
  auto it = std::lower_bound(bins_.begin(), bins_.end(), j,
                             [](const auto& e, long key) { return e.first < key; });
  if (it == bins_.end() || it->first != j) {
    EnvelopeBin b;
    b.a_lo = static_cast<double>(j) * width_;
    b.a_hi = static_cast<double>(j + 1) * width_;
    b.min_f = p.fidelity;
    b.count = 1;
    bins_.insert(it, {j, b});
    return;
  }
  it->second.min_f = std::min(it->second.min_f, p.fidelity);
  ++it->second.count;
}

void EnvelopeCurve::merge(const EnvelopeCurve& other) {
  if (other.width_ != width_) throw std::invalid_argument("cannot merge envelopes of different bin width");
  for (const auto& [j, b] : other.bins_) {
    auto it = std::lower_bound(bins_.begin(), bins_.end(), j,
                               [](const auto& e, long key) { return e.first < key; });
    if (it == bins_.end() || it->first != j) {
      bins_.insert(it, {j, b});
    } else {
      it->second.min_f = std::min(it->second.min_f, b.min_f);
      it->second.count += b.count;
    }
  }
}

std::vector<EnvelopeBin> EnvelopeCurve::bins() const {
  std::vector<EnvelopeBin> out;
  out.reserve(bins_.size());
  for (const auto& e : bins_) out.push_back(e.second);
  return out;
}

std::optional<EnvelopeBin> EnvelopeCurve::lookup(double a) const {
  const long j = bin_index(a);
  auto it = std::lower_bound(bins_.begin(), bins_.end(), j,
                             [](const auto& e, long key) { return e.first < key; });
  if (it == bins_.end() || it->first != j) return std::nullopt;
  return it->second;
}

FidelityCurve sample_fidelity_curve(const WitnessSpec& w, const TargetPovm& target, long n_samples,
                                    double bin_width, const RngStream& rng,
                                    const OptimizerConfig& cfg) {
  cfg.check();
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  const int O = w.scenario().povm_outcomes;
  if (static_cast<int>(target.povm.size()) != O) {
    throw std::invalid_argument("target outcome count does not match the witness");
  }
  FidelityCurve out{{}, EnvelopeCurve(bin_width), {}, 0};

  struct Slot {
    std::optional<SamplePoint> point;
    SamplerStats stats;
  };
  std::vector<Slot> slots(n_samples);
  detail::parallel_for(static_cast<int>(n_samples), cfg.threads, [&](int i) {
    RngStream s = rng.child(static_cast<std::uint64_t>(i));
    Slot& slot = slots[i];
    try {
      Povm p;
      if (O == 4 && i % 2 == 1) {
        p = random_extremal_povm(3, s, &slot.stats);
        const int pos = s.index(4);
        p.elements.insert(p.elements.begin() + pos, PovmElement(0.0, BlochVector()));
      } else {
        p = random_extremal_povm(O, s, &slot.stats);
      }
      OptimizerConfig local = cfg;
      local.restarts = kSampleRestarts;
      local.threads = 1;
      local.seed = s.next_u64();
      const double a = maximize_given_povm(w, p, local).value;
      const double f = best_fidelity_over_relabelings(p, target);
      slot.point = SamplePoint{a, f, i};
    } catch (const std::runtime_error&) {
      slot.point.reset();
    }
  });

  for (const auto& slot : slots) {
    out.sampler.attempts += slot.stats.attempts;
    out.sampler.accepted += slot.stats.accepted;
    if (!slot.point) {
      ++out.skipped;
      continue;
    }
    out.points.push_back(*slot.point);
    out.envelope.add(*slot.point);
  }
  return out;
}

}  // namespace povmcert
