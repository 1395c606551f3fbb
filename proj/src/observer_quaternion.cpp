#include "se23nav/observer.hpp"

#include "se23nav/errors.hpp"

#include <string>

namespace se23nav {

QuatObserverState QuatObserverState::from(const ObserverState& s) {
  QuatObserverState q;
  q.q = rot_to_quat(s.xhat.r);
  q.p = s.xhat.p;
  q.v = s.xhat.v;
  q.sigma_hat = s.sigma_hat;
  q.g_hat = s.g_hat;
  q.mode = s.mode;
  return q;
}

NavState QuatObserverState::nav() const {
  NavState x;
  x.r = quat_to_rot(q);
  x.p = p;
  x.v = v;
  return x;
}

ObserverState QuatObserverState::as_observer_state() const {
  ObserverState s;
  s.xhat = nav();
  s.sigma_hat = sigma_hat;
  s.g_hat = g_hat;
  s.mode = mode;
  return s;
}

namespace {

// Right action of exp(U_m dt), U_m = u([Omega_m]x, 0, a_m, 1): the bottom row of
// the intermediate picks up dt in the P column, tracked by the caller.
QuatObserverState propagate(const QuatObserverState& s, const ImuReading& imu, double dt) {
  const Vec3 phi = imu.omega_m * dt;
  const Mat3 r = quat_to_rot(s.q).matrix();
  QuatObserverState out = s;
  out.q = quat_product(s.q, quat_exp(phi));
  out.v = s.v + r * (so3_first_integral(phi) * imu.a_m) * dt;
  out.p = s.p + s.v * dt + r * (so3_second_integral(phi) * imu.a_m) * dt * dt;
  return out;
}

// Left action of exp(-W dt), W = u([w]x, w_v, w_a, 1), on an intermediate whose
// bottom row is [0 0 0 dt 1].
void apply_correction(QuatObserverState& s, const Vec3& w_omega, const Vec3& w_v, const Vec3& w_a,
                      double dt) {
  const Vec3 phi = -w_omega * dt;
  const Quat qw = quat_exp(phi);
  const Mat3 rw = quat_to_rot(qw).matrix();
  const Mat3 j1 = so3_first_integral(phi);
  const Mat3 j2 = so3_second_integral(phi);
  const Vec3 v_col = -(j1 * w_a) * dt;
  const Vec3 p_col = -(j1 * w_v) * dt + (j2 * w_a) * dt * dt;

  s.q = quat_product(qw, s.q);
  s.p = rw * s.p + p_col + v_col * dt;
  s.v = rw * s.v + v_col;
}

void check_finite(const QuatObserverState& s) {
  if (!std::isfinite(s.q.w) || !s.q.v.allFinite() || !s.p.allFinite() || !s.v.allFinite() ||
      !s.sigma_hat.allFinite() || !s.g_hat.allFinite()) {
    throw NonFiniteState("quaternion observer state became non-finite");
  }
}

}  // namespace

QuatObserverState step_quaternion(const QuatObserverState& state, const ImuReading& imu,
                                  const LandmarkMap& map, const LandmarkObservation& obs,
                                  const Gains& gains, double dt) {
  QuatObserverState next = propagate(state, imu, dt);

  // Phi_q = M R~, v_q = R~^T P~_eps and ||M R~||_I = Tr{M - Phi_q}/4 all come
  // from the aggregate evaluated at R_Q and the gravity-compensated prediction.
  QuatObserverState compensated = next;
  apply_correction(compensated, Vec3::Zero(), Vec3::Zero(), -state.g_hat, dt);
  ObserverState pred = next.as_observer_state();
  pred.xhat.p = compensated.p;
  pred.xhat.v = compensated.v;
  const MeasurementSummary summary = aggregate(map, obs, pred.xhat.r, pred.xhat.p);
  Correction corr = compute_corrections(summary, pred, gains);
  if (state.mode == GravityMode::adaptive) {
    next.g_hat = gravity_step(pred, corr, summary, gains, dt);
    corr.w_a = -next.g_hat - gains.k_a * summary.rtp_eps;
  }
  next.sigma_hat = sigma_step(pred, summary, corr, gains, dt);

  apply_correction(next, corr.w_omega, corr.w_v, corr.w_a, dt);
  next.q = next.q.normalized();
  check_finite(next);
  return next;
}

QuatObserverState predict_quaternion(const QuatObserverState& state, const ImuReading& imu,
                                     double dt) {
  QuatObserverState next = propagate(state, imu, dt);
  apply_correction(next, Vec3::Zero(), Vec3::Zero(), -state.g_hat, dt);
  next.q = next.q.normalized();
  check_finite(next);
  return next;
}

}  // namespace se23nav
