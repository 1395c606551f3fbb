#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>

namespace se23nav {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat5 = Eigen::Matrix<double, 5, 5>;

/// Frobenius bound on ||S + S^T|| accepted by vex().
inline constexpr double kSkewTolerance = 1e-9;
/// Below this rotation angle (rad) the Rodrigues coefficients switch to their series.
inline constexpr double kSmallAngle = 1e-8;
/// Tolerance used when validating rotations and SE2(3) block structure.
inline constexpr double kGroupTolerance = 1e-9;

/// [x]x, so that skew(a) * b == a.cross(b).
Mat3 skew(const Vec3& x);

/// Inverse of skew(). Throws NotSkewSymmetric if ||s + s^T||_F > kSkewTolerance.
Vec3 vex(const Mat3& s);

/// Anti-symmetric projection (A - A^T) / 2.
Mat3 antisymmetric_part(const Mat3& a);

/// vex of the anti-symmetric projection; zero iff `a` is symmetric.
Vec3 upsilon(const Mat3& a);

/// Element of SO(3).
class Rotation {
 public:
  Rotation() : m_(Mat3::Identity()) {}

  /// Validates orthonormality and det = +1 within `tol`; throws InvalidRotation.
  static Rotation from_matrix(const Mat3& m, double tol = kGroupTolerance);
  /// No validation; the caller guarantees `m` is a rotation (closed-form maps).
  static Rotation unchecked(const Mat3& m) { return Rotation(m); }
  /// Rotation of `angle` rad about `axis` (normalized internally).
  static Rotation about_axis(const Vec3& axis, double angle);

  const Mat3& matrix() const { return m_; }
  Rotation transpose() const { return Rotation(m_.transpose()); }
  Rotation operator*(const Rotation& other) const { return Rotation(m_ * other.m_); }
  Vec3 operator*(const Vec3& x) const { return m_ * x; }

  /// ||R R^T - I||_F
  double orthonormality_error() const;
  /// Nearest-orthonormal projection by Gram-Schmidt on the rows.
  Rotation reorthonormalized() const;

 private:
  explicit Rotation(const Mat3& m) : m_(m) {}
  Mat3 m_;
};

/// Attitude distance Tr{I - R} / 4, in [0, 1].
double dist_so3(const Rotation& r);

/// Closed-form exp([omega * dt]x).
Rotation rodrigues_exp(const Vec3& omega, double dt);

/// SE2(3) element Psi(R, P, V).
struct NavState {
  Rotation r;
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();

  static NavState identity() { return {}; }
  /// Validates the [0 0 0 1 0; 0 0 0 0 1] bottom rows and the rotation block.
  static NavState from_matrix(const Mat5& x, double tol = kGroupTolerance);

  Mat5 matrix() const;
  bool is_finite() const;
};

NavState operator*(const NavState& a, const NavState& b);

/// Psi(R^T, -R^T P, -R^T V)
NavState nav_inverse(const NavState& x);

/// X * Xhat^-1: R~ = R Rhat^T, P~ = P - R~ Phat, V~ = V - R~ Vhat.
NavState nav_error(const NavState& x, const NavState& xhat);

/// u([omega]x, vcol, acol, kappa): the 5x5 tangent element
///
///   [ [omega]x  vcol  acol ]
///   [  0 0 0     0     0   ]
///   [  0 0 0   kappa   0   ]
struct TangentElement {
  Vec3 omega = Vec3::Zero();
  Vec3 vcol = Vec3::Zero();
  Vec3 acol = Vec3::Zero();
  double kappa = 0.0;

  Mat5 matrix() const;
};

/// Matrix exponential by scaling-and-squaring with a 13-term Taylor core.
Mat5 expm5(const Mat5& a);

/// exp(u * dt) of the materialized tangent element.
Mat5 expm5(const TangentElement& u, double dt);

/// Closed-form exp(u * dt). Agrees with expm5() to rounding; used by the
/// quaternion observer as an independent evaluation path.
Mat5 expm5_closed_form(const TangentElement& u, double dt);

/// sum_k (-1)^k theta^(2k) / (2k + n)!  for n in [0, 4].
double rotation_series_coefficient(int n, double theta);

/// sum_k [phi]x^k / (k+1)!  (left Jacobian of SO(3)).
Mat3 so3_first_integral(const Vec3& phi);
/// sum_k [phi]x^k / (k+2)!
Mat3 so3_second_integral(const Vec3& phi);

}  // namespace se23nav
