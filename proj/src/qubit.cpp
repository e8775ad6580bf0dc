#include "povmcert/qubit.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace povmcert {

namespace {

Mat2 make_pauli(Complex a, Complex b, Complex c, Complex d) {
  Mat2 m;
  m << a, b, c, d;
  return m;
}

bool finite(const Vec3& v) { return v.allFinite(); }

}  // namespace

const Mat2& pauli_x() {
  static const Mat2 m = make_pauli(0.0, 1.0, 1.0, 0.0);
  return m;
}

const Mat2& pauli_y() {
  static const Mat2 m = make_pauli(0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0);
  return m;
}

const Mat2& pauli_z() {
  static const Mat2 m = make_pauli(1.0, 0.0, 0.0, -1.0);
  return m;
}

Mat2 pauli_dot(const Vec3& r) { return r[0] * pauli_x() + r[1] * pauli_y() + r[2] * pauli_z(); }

BlochVector::BlochVector(const Vec3& r) : r_(r) {
  if (!finite(r)) {
    throw std::invalid_argument("Bloch vector has non-finite entries");
  }
  if (r.norm() > 1.0 + kNormTol) {
    std::ostringstream os;
    os << "Bloch vector norm " << r.norm() << " exceeds 1";
    throw std::invalid_argument(os.str());
  }
}

Mat2 QubitState::density() const { return density_from_bloch(bloch); }

PovmElement::PovmElement(double lambda, const BlochVector& n) : weight(lambda), bloch(n) {
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw std::invalid_argument("POVM element weight must be finite and non-negative");
  }
}

Observable::Observable(const Vec3& axis) : axis_(axis) {
  if (!finite(axis) || std::abs(axis.norm() - 1.0) > kNormTol) {
    throw std::invalid_argument("observable axis must be a unit vector");
  }
}

Mat2 Observable::projector(int outcome) const {
  const double sign = outcome == 0 ? 1.0 : -1.0;
  return 0.5 * (Mat2::Identity() + sign * pauli_dot(axis_));
}

Mat2 density_from_bloch(const BlochVector& r) { return 0.5 * (Mat2::Identity() + pauli_dot(r.vec())); }

Vec3 bloch_from_matrix(const Mat2& m) {
  return Vec3((m * pauli_x()).trace().real(), (m * pauli_y()).trace().real(),
              (m * pauli_z()).trace().real());
}

Mat2 povm_element_matrix(const PovmElement& e) {
  return e.weight * (Mat2::Identity() + pauli_dot(e.bloch.vec()));
}

ValidationResult validate_povm(const Povm& p) {
  ValidationResult result;
  if (p.elements.empty()) {
    result.violations.push_back({ViolationKind::Empty, -1, 1.0, "POVM has no elements"});
    return result;
  }
  double weight_sum = 0.0;
  Vec3 balance = Vec3::Zero();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& e = p[i];
    if (e.weight < 0.0) {
      result.violations.push_back(
          {ViolationKind::NegativeWeight, static_cast<int>(i), -e.weight, "negative weight"});
    }
    if (e.bloch.norm() > 1.0 + kNormTol) {
      result.violations.push_back({ViolationKind::BlochNormExceeded, static_cast<int>(i),
                                   e.bloch.norm() - 1.0, "Bloch vector longer than 1"});
    }
    weight_sum += e.weight;
    balance += e.weight * e.bloch.vec();
  }
  if (std::abs(weight_sum - 1.0) > kCompletenessTol) {
    result.violations.push_back(
        {ViolationKind::WeightSum, -1, std::abs(weight_sum - 1.0), "weights do not sum to 1"});
  }
  if (balance.norm() > kCompletenessTol) {
    result.violations.push_back({ViolationKind::BlochBalance, -1, balance.norm(),
                                 "weighted Bloch vectors do not sum to 0"});
  }
  return result;
}

std::string to_string(ExtremalClass c) {
  switch (c) {
    case ExtremalClass::Projective:
      return "projective";
    case ExtremalClass::Extremal3:
      return "extremal-3";
    case ExtremalClass::Extremal4:
      return "extremal-4";
    case ExtremalClass::Other:
      break;
  }
  return "other";
}

double triple_product(const Vec3& a, const Vec3& b, const Vec3& c) {
  return std::abs(a.dot(b.cross(c)));
}

ExtremalClass classify_extremal(const Povm& p) {
  std::vector<Vec3> dirs;
  for (const auto& e : p.elements) {
    if (e.weight < kZeroWeight) continue;
    if (std::abs(e.bloch.norm() - 1.0) > kNormTol) return ExtremalClass::Other;
    dirs.push_back(e.bloch.vec());
  }
  switch (dirs.size()) {
    case 2:
      return (dirs[0] + dirs[1]).norm() <= kNormTol ? ExtremalClass::Projective
                                                     : ExtremalClass::Other;
    case 3:
      return triple_product(dirs[0], dirs[1], dirs[2]) < kCoplanarTol ? ExtremalClass::Extremal3
                                                                      : ExtremalClass::Other;
    case 4:
      for (int skip = 0; skip < 4; ++skip) {
        std::array<Vec3, 3> t;
        int j = 0;
        for (int i = 0; i < 4; ++i) {
          if (i != skip) t[j++] = dirs[i];
        }
        if (triple_product(t[0], t[1], t[2]) < kCoplanarTol) return ExtremalClass::Other;
      }
      return ExtremalClass::Extremal4;
    default:
      return ExtremalClass::Other;
  }
}

bool is_hermitian(const Mat2& m, double tol) {
  if (!m.allFinite()) return false;
  return std::abs(m(0, 0).imag()) <= tol && std::abs(m(1, 1).imag()) <= tol &&
         std::abs(m(0, 1) - std::conj(m(1, 0))) <= tol;
}

Eigen2 eig_hermitian2(const Mat2& m) {
  if (!is_hermitian(m)) {
    throw std::invalid_argument("eig_hermitian2: matrix is not Hermitian");
  }
  // m = a*1 + b.sigma
  const double a = 0.5 * (m(0, 0).real() + m(1, 1).real());
  const Complex off = 0.5 * (m(1, 0) + std::conj(m(0, 1)));
  const Vec3 b(off.real(), off.imag(), 0.5 * (m(0, 0).real() - m(1, 1).real()));
  const double r = b.norm();

  Eigen2 out;
  out.values = {a + r, a - r};
  const double scale = std::max({std::abs(a), r, 1.0});
  if (r <= 1e-15 * scale) {
    out.vectors[0] = Eigen::Vector2cd(1.0, 0.0);
    out.vectors[1] = Eigen::Vector2cd(0.0, 1.0);
    return out;
  }
  const Vec3 n = b / r;
  Eigen::Vector2cd up;
  if (n[2] > -0.5) {
    up = Eigen::Vector2cd(1.0 + n[2], Complex(n[0], n[1]));
  } else {
    // better conditioned near the south pole
    up = Eigen::Vector2cd(Complex(n[0], -n[1]), 1.0 - n[2]);
  }
  up.normalize();
  out.vectors[0] = up;
  out.vectors[1] = Eigen::Vector2cd(-std::conj(up[1]), std::conj(up[0]));
  return out;
}

QubitState depolarize(const QubitState& s, double v) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::invalid_argument("visibility must lie in [0, 1]");
  }
  return QubitState{BlochVector(v * s.bloch.vec())};
}

Povm rotate(const Povm& p, const Mat3& rotation) {
  Povm out;
  out.elements.reserve(p.size());
  for (const auto& e : p.elements) {
    Vec3 n = rotation * e.bloch.vec();
    // keep unit vectors unit under rounding
    if (n.norm() > 1.0) n.normalize();
    out.elements.emplace_back(e.weight, BlochVector(n));
  }
  return out;
}

Mat2 povm_sum(const Povm& p) {
  Mat2 s = Mat2::Zero();
  for (const auto& e : p.elements) s += povm_element_matrix(e);
  return s;
}

}  // namespace povmcert
