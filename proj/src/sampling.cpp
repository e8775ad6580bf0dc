#include "povmcert/sampling.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Geometry>

namespace povmcert {

namespace {

std::mt19937_64 seeded_engine(const std::vector<std::uint64_t>& path) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * path.size());
  for (auto v : path) {
    words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

Vec3 gaussian3(RngStream& rng) {
  return Vec3(rng.normal(), rng.normal(), rng.normal());
}

Vec3 unit3(RngStream& rng) {
  for (;;) {
    Vec3 g = gaussian3(rng);
    const double n = g.norm();
    if (n > 1e-12) return g / n;
  }
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : RngStream(std::vector<std::uint64_t>{seed, stream}) {}

RngStream::RngStream(std::vector<std::uint64_t> path)
    : path_(std::move(path)), engine_(seeded_engine(path_)) {}

RngStream RngStream::child(std::uint64_t index) const {
  auto p = path_;
  p.push_back(index);
  return RngStream(std::move(p));
}

int RngStream::index(int n) {
  if (n < 1) throw std::invalid_argument("RngStream::index: n must be positive");
  std::uniform_int_distribution<int> d(0, n - 1);
  return d(engine_);
}

BlochVector random_unit_vector(RngStream& rng) { return BlochVector(unit3(rng)); }

Povm random_extremal_povm(int outcomes, RngStream& rng, SamplerStats* stats) {
  if (outcomes != 3 && outcomes != 4) {
    throw std::invalid_argument("random_extremal_povm: outcomes must be 3 or 4");
  }
  for (long rejected = 0; rejected < kMaxRejections; ++rejected) {
    if (stats) ++stats->attempts;
    std::vector<Vec3> dirs(outcomes);
    Eigen::VectorXd lambda;
    if (outcomes == 4) {
      Eigen::Matrix4d a;
      for (int i = 0; i < 4; ++i) {
        dirs[i] = unit3(rng);
        a(0, i) = 1.0;
        a.block<3, 1>(1, i) = dirs[i];
      }
      Eigen::FullPivLU<Eigen::Matrix4d> lu(a);
      if (!lu.isInvertible()) continue;
      lambda = lu.solve(Eigen::Vector4d(1.0, 0.0, 0.0, 0.0));
    } else {
      const Mat3 r = random_unitary(rng).matrix();
      const Vec3 u = r * Vec3::UnitX();
      const Vec3 w = r * Vec3::UnitZ();
      Eigen::Matrix3d a;
      for (int i = 0; i < 3; ++i) {
        const double phi = 2.0 * M_PI * rng.uniform();
        dirs[i] = std::cos(phi) * u + std::sin(phi) * w;
        dirs[i].normalize();
        a(0, i) = 1.0;
        a(1, i) = dirs[i].dot(u);
        a(2, i) = dirs[i].dot(w);
      }
      Eigen::FullPivLU<Eigen::Matrix3d> lu(a);
      if (!lu.isInvertible()) continue;
      lambda = lu.solve(Eigen::Vector3d(1.0, 0.0, 0.0));
    }
    bool ok = lambda.allFinite();
    for (int i = 0; ok && i < outcomes; ++i) ok = lambda[i] > kMinSampledWeight;
    if (!ok) continue;

    Povm p;
    for (int i = 0; i < outcomes; ++i) p.elements.emplace_back(lambda[i], BlochVector(dirs[i]));
    if (!validate_povm(p).ok()) continue;
    if (stats) ++stats->accepted;
    return p;
  }
  throw std::runtime_error("random_extremal_povm: too many consecutive rejections");
}

Mat3 AxisAngle::matrix() const { return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix(); }

AxisAngle random_unitary(RngStream& rng) {
  Eigen::Vector4d q;
  do {
    q = Eigen::Vector4d(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  } while (q.norm() < 1e-12);
  q.normalize();
  if (q[0] < 0.0) q = -q;
  AxisAngle out;
  const Vec3 v = q.tail<3>();
  const double s = v.norm();
  out.angle = 2.0 * std::atan2(s, q[0]);
  out.axis = s > 1e-15 ? Vec3(v / s) : Vec3::UnitZ();
  return out;
}

}  // namespace povmcert
