#pragma once

#include "se23nav/lie.hpp"

namespace se23nav {

/// Unit quaternion [q0, q] with scalar part first.
struct Quat {
  double w = 1.0;
  Vec3 v = Vec3::Zero();

  static Quat identity() { return {}; }
  double norm() const;
  Quat normalized() const;
  /// Inverse for unit quaternions: [q0, -q].
  Quat conjugate() const { return {w, -v}; }
};

/// [q01 q02 - q1.q2, q01 q2 + q02 q1 + q1 x q2], renormalized.
Quat quat_product(const Quat& a, const Quat& b);

/// (q0^2 - |q|^2) I + 2 q q^T + 2 q0 [q]x. Throws NonUnitQuaternion if | |Q| - 1 | > 1e-6.
Rotation quat_to_rot(const Quat& q);

/// Inverse of quat_to_rot with the scalar part kept non-negative. Because Q and -Q
/// describe the same rotation this is a convention, not a constraint.
Quat rot_to_quat(const Rotation& r);

/// Quaternion of the rotation vector `phi` (angle |phi| about phi/|phi|).
Quat quat_exp(const Vec3& phi);

}  // namespace se23nav
