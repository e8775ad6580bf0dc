#pragma once

// Seeded random streams and samplers for unit vectors, rotations and
// extremal qubit POVMs.

#include <cstdint>
#include <random>
#include <vector>

#include "povmcert/qubit.hpp"

namespace povmcert {

/// A deterministic random stream identified by a seed and a path of stream
/// indices. Identical identifiers yield identical draw sequences.
class RngStream {
public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  /// Independent stream addressed by appending `index` to this stream's path.
  RngStream child(std::uint64_t index) const;

  std::uint64_t seed() const { return path_.front(); }
  const std::vector<std::uint64_t>& path() const { return path_; }

  double normal() { return normal_(engine_); }
  /// Uniform in [0, 1).
  double uniform() { return uniform_(engine_); }
  std::uint64_t next_u64() { return engine_(); }
  /// Uniform integer in [0, n). Throws std::invalid_argument for n < 1.
  int index(int n);
  std::mt19937_64& engine() { return engine_; }

private:
  explicit RngStream(std::vector<std::uint64_t> path);

  std::vector<std::uint64_t> path_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Uniform on the unit sphere (normalized Gaussian 3-vector).
BlochVector random_unit_vector(RngStream& rng);

inline constexpr double kMinSampledWeight = 1e-6;
inline constexpr long kMaxRejections = 1000000;

/// Attempt bookkeeping of the rejection sampler.
struct SamplerStats {
  long attempts = 0;
  long accepted = 0;
  double acceptance_rate() const {
    return attempts == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(attempts);
  }
};

/// Random extremal POVM with O in {3, 4} outcomes: unit directions drawn
/// uniformly (in a uniformly random plane for O = 3), weights solved from
/// sum lambda = 1, sum lambda n = 0, rejected unless every lambda > 1e-6.
/// Throws std::invalid_argument for other O and std::runtime_error after
/// kMaxRejections consecutive rejections.
Povm random_extremal_povm(int outcomes, RngStream& rng, SamplerStats* stats = nullptr);

/// A rotation of the Bloch sphere in axis-angle form.
struct AxisAngle {
  Vec3 axis = Vec3::UnitZ();
  double angle = 0.0;

  Mat3 matrix() const;
};

/// Haar-random rotation: uniform axis, angle density proportional to
/// sin^2(angle/2).
AxisAngle random_unitary(RngStream& rng);

}  // namespace povmcert
