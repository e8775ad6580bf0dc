#pragma once

// Small exact algebra for qubit states, two-outcome observables and POVMs
// in the Bloch parameterization E = lambda * (1 + n.sigma).

#include <array>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace povmcert {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kNormTol = 1e-9;
inline constexpr double kCompletenessTol = 1e-8;
inline constexpr double kZeroWeight = 1e-12;
inline constexpr double kCoplanarTol = 1e-7;
inline constexpr double kHermitianTol = 1e-9;

const Mat2& pauli_x();
const Mat2& pauli_y();
const Mat2& pauli_z();

/// r.sigma
Mat2 pauli_dot(const Vec3& r);

/// A real 3-vector with |r| <= 1 + kNormTol.
class BlochVector {
public:
  BlochVector() : r_(Vec3::Zero()) {}
  /// Throws std::invalid_argument when the norm exceeds 1 + kNormTol or an
  /// entry is not finite.
  explicit BlochVector(const Vec3& r);
  BlochVector(double x, double y, double z) : BlochVector(Vec3(x, y, z)) {}

  const Vec3& vec() const { return r_; }
  double norm() const { return r_.norm(); }
  double operator[](int i) const { return r_[i]; }

private:
  Vec3 r_;
};

struct QubitState {
  BlochVector bloch;

  static QubitState from_bloch(const Vec3& r) { return QubitState{BlochVector(r)}; }
  Mat2 density() const;
  bool is_pure() const { return std::abs(bloch.norm() - 1.0) <= kNormTol; }
};

struct PovmElement {
  PovmElement() = default;
  /// Throws std::invalid_argument on negative or non-finite weight.
  PovmElement(double lambda, const BlochVector& n);

  double weight = 0.0;
  BlochVector bloch;
};

/// Outcome index is the position in `elements`.
struct Povm {
  std::vector<PovmElement> elements;

  std::size_t size() const { return elements.size(); }
  const PovmElement& operator[](std::size_t i) const { return elements[i]; }
};

/// Two-outcome projective measurement M = n.sigma; outcome 0 is the +1
/// eigenprojector (1 + n.sigma)/2.
class Observable {
public:
  Observable() : axis_(0.0, 0.0, 1.0) {}
  /// Throws std::invalid_argument unless | |axis| - 1 | <= kNormTol.
  explicit Observable(const Vec3& axis);

  const Vec3& axis() const { return axis_; }
  Mat2 projector(int outcome) const;

private:
  Vec3 axis_;
};

Mat2 density_from_bloch(const BlochVector& r);

/// Inverse of density_from_bloch for a Hermitian matrix: (Tr(m sigma_i)).
Vec3 bloch_from_matrix(const Mat2& m);

Mat2 povm_element_matrix(const PovmElement& e);

enum class ViolationKind { NegativeWeight, BlochNormExceeded, WeightSum, BlochBalance, Empty };

struct Violation {
  ViolationKind kind;
  int element = -1;  // -1 for whole-POVM constraints
  double residual = 0.0;
  std::string message;
};

struct ValidationResult {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

ValidationResult validate_povm(const Povm& p);

enum class ExtremalClass { Projective, Extremal3, Extremal4, Other };

std::string to_string(ExtremalClass c);

ExtremalClass classify_extremal(const Povm& p);

/// |a . (b x c)|
double triple_product(const Vec3& a, const Vec3& b, const Vec3& c);

struct Eigen2 {
  std::array<double, 2> values;        // descending
  std::array<Eigen::Vector2cd, 2> vectors;
};

/// Closed-form spectral decomposition of a Hermitian 2x2 matrix.
/// Throws std::invalid_argument on non-Hermitian input.
Eigen2 eig_hermitian2(const Mat2& m);

bool is_hermitian(const Mat2& m, double tol = kHermitianTol);

/// v * rho + (1 - v) * 1/2, i.e. the Bloch vector scaled by v.
QubitState depolarize(const QubitState& s, double v);

/// Bloch vectors of the elements rotated by R (lambda unchanged).
Povm rotate(const Povm& p, const Mat3& rotation);

/// Sum_i E_i as a matrix; equals the identity for a valid POVM.
Mat2 povm_sum(const Povm& p);

}  // namespace povmcert
