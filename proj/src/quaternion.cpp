#include "se23nav/quaternion.hpp"

#include "se23nav/errors.hpp"

#include <cmath>
#include <string>

namespace se23nav {

double Quat::norm() const { return std::sqrt(w * w + v.squaredNorm()); }

Quat Quat::normalized() const {
  const double n = norm();
  return {w / n, v / n};
}

Quat quat_product(const Quat& a, const Quat& b) {
  Quat out;
  out.w = a.w * b.w - a.v.dot(b.v);
  out.v = a.w * b.v + b.w * a.v + a.v.cross(b.v);
  return out.normalized();
}

Rotation quat_to_rot(const Quat& q) {
  const double n = q.norm();
  if (!(std::abs(n - 1.0) <= 1e-6)) {
    throw NonUnitQuaternion("quaternion norm " + std::to_string(n));
  }
  const Mat3 r = (q.w * q.w - q.v.squaredNorm()) * Mat3::Identity() + 2.0 * q.v * q.v.transpose() +
                 2.0 * q.w * skew(q.v);
  return Rotation::unchecked(r);
}

Quat rot_to_quat(const Rotation& rot) {
  // Shepperd: pick the largest of 4q0^2 - 1 = tr, and 4qi^2 - 1 = 2 R_ii - tr.
  const Mat3& r = rot.matrix();
  const double tr = r.trace();
  Quat q;
  if (tr >= r(0, 0) && tr >= r(1, 1) && tr >= r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + tr);  // 4 q0
    q.w = 0.25 * s;
    q.v = Vec3(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1)) / s;
  } else if (r(0, 0) >= r(1, 1) && r(0, 0) >= r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + 2.0 * r(0, 0) - tr);  // 4 q1
    q.w = (r(2, 1) - r(1, 2)) / s;
    q.v = Vec3(0.25 * s, (r(0, 1) + r(1, 0)) / s, (r(0, 2) + r(2, 0)) / s);
  } else if (r(1, 1) >= r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + 2.0 * r(1, 1) - tr);  // 4 q2
    q.w = (r(0, 2) - r(2, 0)) / s;
    q.v = Vec3((r(0, 1) + r(1, 0)) / s, 0.25 * s, (r(1, 2) + r(2, 1)) / s);
  } else {
    const double s = 2.0 * std::sqrt(1.0 + 2.0 * r(2, 2) - tr);  // 4 q3
    q.w = (r(1, 0) - r(0, 1)) / s;
    q.v = Vec3((r(0, 2) + r(2, 0)) / s, (r(1, 2) + r(2, 1)) / s, 0.25 * s);
  }
  if (q.w < 0.0) {
    q.w = -q.w;
    q.v = -q.v;
  }
  return q.normalized();
}

Quat quat_exp(const Vec3& phi) {
  const double theta = phi.norm();
  const double half = 0.5 * theta;
  // sin(theta/2)/theta, with its series near zero.
  const double k = theta < 1e-4 ? 0.5 - theta * theta / 48.0 : std::sin(half) / theta;
  return Quat{std::cos(half), k * phi}.normalized();
}

}  // namespace se23nav
