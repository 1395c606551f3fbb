#include "se23nav/lie.hpp"

#include "se23nav/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace se23nav {

Mat3 skew(const Vec3& x) {
  Mat3 s;
  // clang-format off
  s <<  0.0,   -x.z(),  x.y(),
        x.z(),  0.0,   -x.x(),
       -x.y(),  x.x(),  0.0;
  // clang-format on
  return s;
}

Vec3 vex(const Mat3& s) {
  const double asym = (s + s.transpose()).norm();
  if (!(asym <= kSkewTolerance)) {
    throw NotSkewSymmetric("vex: ||S + S^T||_F = " + std::to_string(asym));
  }
  return {s(2, 1), s(0, 2), s(1, 0)};
}

Mat3 antisymmetric_part(const Mat3& a) { return 0.5 * (a - a.transpose()); }

Vec3 upsilon(const Mat3& a) {
  // Read straight off the projection; it is skew by construction.
  return {0.5 * (a(2, 1) - a(1, 2)), 0.5 * (a(0, 2) - a(2, 0)), 0.5 * (a(1, 0) - a(0, 1))};
}

Rotation Rotation::from_matrix(const Mat3& m, double tol) {
  if (!m.allFinite()) {
    throw InvalidRotation("rotation has non-finite entries");
  }
  const double ortho = (m * m.transpose() - Mat3::Identity()).norm();
  const double det = m.determinant();
  if (ortho > tol || std::abs(det - 1.0) > tol) {
    throw InvalidRotation("not a rotation: ||RR^T - I||_F = " + std::to_string(ortho) +
                          ", det = " + std::to_string(det));
  }
  return Rotation(m);
}

Rotation Rotation::about_axis(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (n == 0.0) {
    return Rotation();
  }
  return rodrigues_exp(axis / n, angle);
}

double Rotation::orthonormality_error() const {
  return (m_ * m_.transpose() - Mat3::Identity()).norm();
}

Rotation Rotation::reorthonormalized() const {
  const Vec3 r0 = m_.row(0).transpose().normalized();
  Vec3 r1 = m_.row(1).transpose();
  r1 = (r1 - r0.dot(r1) * r0).normalized();
  const Vec3 r2 = r0.cross(r1);
  Mat3 out;
  out.row(0) = r0.transpose();
  out.row(1) = r1.transpose();
  out.row(2) = r2.transpose();
  return Rotation(out);
}

double dist_so3(const Rotation& r) {
  const double d = (3.0 - r.matrix().trace()) / 4.0;
  return std::clamp(d, 0.0, 1.0);
}

Rotation rodrigues_exp(const Vec3& omega, double dt) {
  const Vec3 phi = omega * dt;
  const double theta = phi.norm();
  const Mat3 k = skew(phi);
  if (theta < kSmallAngle) {
    return Rotation::unchecked(Mat3::Identity() + k + 0.5 * k * k);
  }
  const double a = std::sin(theta) / theta;
  const double b = (1.0 - std::cos(theta)) / (theta * theta);
  return Rotation::unchecked(Mat3::Identity() + a * k + b * k * k);
}

Mat5 NavState::matrix() const {
  Mat5 x = Mat5::Identity();
  x.block<3, 3>(0, 0) = r.matrix();
  x.block<3, 1>(0, 3) = p;
  x.block<3, 1>(0, 4) = v;
  return x;
}

NavState NavState::from_matrix(const Mat5& x, double tol) {
  Eigen::Matrix<double, 2, 5> bottom;
  bottom << 0, 0, 0, 1, 0,
            0, 0, 0, 0, 1;
  const double dev = (x.block<2, 5>(3, 0) - bottom).cwiseAbs().maxCoeff();
  if (!(dev <= tol)) {
    throw InvalidRotation("not an SE2(3) element: bottom rows deviate by " + std::to_string(dev));
  }
  NavState out;
  out.r = Rotation::from_matrix(x.block<3, 3>(0, 0), tol);
  out.p = x.block<3, 1>(0, 3);
  out.v = x.block<3, 1>(0, 4);
  return out;
}

bool NavState::is_finite() const { return r.matrix().allFinite() && p.allFinite() && v.allFinite(); }

NavState operator*(const NavState& a, const NavState& b) {
  NavState out;
  out.r = a.r * b.r;
  out.p = a.r * b.p + a.p;
  out.v = a.r * b.v + a.v;
  return out;
}

NavState nav_inverse(const NavState& x) {
  NavState out;
  out.r = x.r.transpose();
  out.p = -(out.r * x.p);
  out.v = -(out.r * x.v);
  return out;
}

NavState nav_error(const NavState& x, const NavState& xhat) {
  NavState out;
  out.r = x.r * xhat.r.transpose();
  out.p = x.p - out.r * xhat.p;
  out.v = x.v - out.r * xhat.v;
  return out;
}

Mat5 TangentElement::matrix() const {
  Mat5 u = Mat5::Zero();
  u.block<3, 3>(0, 0) = skew(omega);
  u.block<3, 1>(0, 3) = vcol;
  u.block<3, 1>(0, 4) = acol;
  u(4, 3) = kappa;
  return u;
}

Mat5 expm5(const Mat5& a) {
  constexpr int kTerms = 13;
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > 0.5) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
  }
  const Mat5 scaled = a / std::ldexp(1.0, squarings);

  // Horner: I + A(I + A/2(I + A/3(...)))
  Mat5 e = Mat5::Identity();
  for (int k = kTerms; k >= 1; --k) {
    e = Mat5::Identity() + (scaled * e) / static_cast<double>(k);
  }
  for (int i = 0; i < squarings; ++i) {
    e = e * e;
  }
  return e;
}

Mat5 expm5(const TangentElement& u, double dt) { return expm5(Mat5(u.matrix() * dt)); }

double rotation_series_coefficient(int n, double theta) {
  const double t2 = theta * theta;
  if (theta < 1.0) {
    // Alternating series; 12 terms are well past double precision for theta < 1.
    double factorial = 1.0;
    for (int i = 2; i <= n; ++i) {
      factorial *= i;
    }
    double term = 1.0 / factorial;
    double sum = term;
    for (int k = 1; k < 12; ++k) {
      term *= -t2 / static_cast<double>((2 * k + n - 1) * (2 * k + n));
      sum += term;
    }
    return sum;
  }
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  switch (n) {
    case 0:
      return c;
    case 1:
      return s / theta;
    case 2:
      return (1.0 - c) / t2;
    case 3:
      return (theta - s) / (t2 * theta);
    case 4:
      return (0.5 * t2 - 1.0 + c) / (t2 * t2);
    default:
      throw Error("rotation_series_coefficient: n out of range");
  }
}

Mat3 so3_first_integral(const Vec3& phi) {
  const double theta = phi.norm();
  const Mat3 k = skew(phi);
  return Mat3::Identity() + rotation_series_coefficient(2, theta) * k +
         rotation_series_coefficient(3, theta) * k * k;
}

Mat3 so3_second_integral(const Vec3& phi) {
  const double theta = phi.norm();
  const Mat3 k = skew(phi);
  return 0.5 * Mat3::Identity() + rotation_series_coefficient(3, theta) * k +
         rotation_series_coefficient(4, theta) * k * k;
}

Mat5 expm5_closed_form(const TangentElement& u, double dt) {
  // Powers of u: the top-right columns pick up sum_k S^k v dt^(k+1)/(k+1)!
  // plus kappa * sum_k S^k a dt^(k+2)/(k+2)! (P column), and sum_k S^k a dt^(k+1)/(k+1)!
  // (V column). The bottom rows stay [0 0 0 1 0; 0 0 0 kappa*dt 1].
  const Vec3 phi = u.omega * dt;
  const double theta = phi.norm();
  const Mat3 k = skew(phi);
  const Mat3 rot = Mat3::Identity() + rotation_series_coefficient(1, theta) * k +
                   rotation_series_coefficient(2, theta) * k * k;
  const Mat3 j1 = so3_first_integral(phi);
  const Mat3 j2 = so3_second_integral(phi);

  Mat5 e = Mat5::Identity();
  e.block<3, 3>(0, 0) = rot;
  e.block<3, 1>(0, 3) = j1 * u.vcol * dt + u.kappa * (j2 * u.acol) * dt * dt;
  e.block<3, 1>(0, 4) = j1 * u.acol * dt;
  e(4, 3) = u.kappa * dt;
  return e;
}

}  // namespace se23nav
