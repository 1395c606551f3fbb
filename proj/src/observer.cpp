#include "se23nav/observer.hpp"

#include "se23nav/errors.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace se23nav {

void Gains::validate() const {
  const std::pair<const char*, double> named[] = {
      {"k_w", k_w},         {"k_v", k_v},         {"k_a", k_a}, {"gamma_sigma", gamma_sigma},
      {"k_sigma", k_sigma}, {"gamma_g", gamma_g}, {"mu", mu},
  };
  for (const auto& [name, value] : named) {
    if (!std::isfinite(value) || !(value > 0.0)) {
      throw ValidationError(name, "must be positive");
    }
  }
}

const char* to_string(GravityMode mode) {
  return mode == GravityMode::known ? "known-gravity" : "adaptive-gravity";
}

ObserverState ObserverState::with_known_gravity(const NavState& xhat, const Vec3& gravity) {
  ObserverState s;
  s.xhat = xhat;
  s.g_hat = gravity;
  s.mode = GravityMode::known;
  return s;
}

ObserverState ObserverState::with_adaptive_gravity(const NavState& xhat, const Vec3& g0) {
  ObserverState s;
  s.xhat = xhat;
  s.g_hat = g0;
  s.mode = GravityMode::adaptive;
  return s;
}

Correction compute_corrections(const MeasurementSummary& summary, const ObserverState& state,
                               const Gains& gains) {
  const double d = summary.dist_m;
  const Vec3 y = upsilon(summary.m_rtilde);
  const Mat3& rhat = state.xhat.r.matrix();
  const Vec3 body_y = rhat.transpose() * y;

  Correction c;
  c.w_omega = -gains.k_w * (d + 1.0) * y -
              0.25 * ((d + 2.0) / (d + 1.0)) * (rhat * body_y.cwiseProduct(state.sigma_hat));
  if (gains.debug_flip_w_omega) {
    c.w_omega = -c.w_omega;
  }
  c.w_v = summary.p_c.cross(c.w_omega) - gains.k_v * summary.rtp_eps;
  c.w_a = -state.g_hat - gains.k_a * summary.rtp_eps;
  c.k_r = gains.gamma_sigma * ((d + 2.0) / 8.0) * std::exp(d);
  return c;
}

Vec3 sigma_step(const ObserverState& state, const MeasurementSummary& summary,
                const Correction& corr, const Gains& gains, double dt) {
  const Vec3 body_y = state.xhat.r.matrix().transpose() * upsilon(summary.m_rtilde);
  return state.sigma_hat + dt * corr.k_r * body_y.cwiseProduct(body_y) -
         dt * gains.k_sigma * gains.gamma_sigma * state.sigma_hat;
}

Vec3 gravity_step(const ObserverState& state, const Correction& corr,
                  const MeasurementSummary& summary, const Gains& gains, double dt) {
  if (state.mode != GravityMode::adaptive) {
    throw ModeError("gravity_step called in known-gravity mode");
  }
  return state.g_hat + dt * (-corr.w_omega.cross(state.g_hat) +
                             gains.mu * gains.gamma_g * summary.rtp_eps);
}

namespace {

NavState top_rows(const Mat5& x) {
  NavState out;
  out.r = Rotation::unchecked(x.block<3, 3>(0, 0));
  out.p = x.block<3, 1>(0, 3);
  out.v = x.block<3, 1>(0, 4);
  return out;
}

ObserverState finish(ObserverState next, const Mat5& x) {
  next.xhat = top_rows(x);
  next.steps += 1;
  if (next.steps % kReorthonormalizeEvery == 0) {
    next.xhat.r = next.xhat.r.reorthonormalized();
  }
  if (!next.xhat.is_finite() || !next.sigma_hat.allFinite() || !next.g_hat.allFinite()) {
    throw NonFiniteState("observer state became non-finite at step " + std::to_string(next.steps));
  }
  return next;
}

TangentElement imu_tangent(const ImuReading& imu) { return {imu.omega_m, Vec3::Zero(), imu.a_m, 1.0}; }

/// u(0, 0, -g_hat, 1): W with every feedback term zero.
TangentElement gravity_only(const ObserverState& s) { return {Vec3::Zero(), Vec3::Zero(), -s.g_hat, 1.0}; }

}  // namespace

ObserverState step(const ObserverState& state, const ImuReading& imu, const LandmarkMap& map,
                   const LandmarkObservation& obs, const Gains& gains, double dt) {
  const Mat5 predicted = state.xhat.matrix() * expm5(imu_tangent(imu), dt);

  // The innovation is taken against the prediction carried through the gravity
  // block of W, so an exact estimate sees zero residual. The rotation is the
  // same as in `predicted`; only the translational part moves.
  ObserverState pred = state;
  pred.xhat = top_rows(expm5(gravity_only(state), -dt) * predicted);
  const MeasurementSummary summary = aggregate(map, obs, pred.xhat.r, pred.xhat.p);

  Correction corr = compute_corrections(summary, pred, gains);
  ObserverState next = state;
  if (state.mode == GravityMode::adaptive) {
    next.g_hat = gravity_step(pred, corr, summary, gains, dt);
    corr.w_a = -next.g_hat - gains.k_a * summary.rtp_eps;
  }
  next.sigma_hat = sigma_step(pred, summary, corr, gains, dt);

  const Mat5 corrected = expm5(corr.as_tangent(), -dt) * predicted;
  return finish(std::move(next), corrected);
}

ObserverState predict(const ObserverState& state, const ImuReading& imu, double dt) {
  const Mat5 x = expm5(gravity_only(state), -dt) * state.xhat.matrix() * expm5(imu_tangent(imu), dt);
  return finish(state, x);
}

Metrics error_metrics(const NavState& x_true, const ObserverState& state, const Vec3& g_true) {
  Metrics m;
  m.attitude = dist_so3(x_true.r * state.xhat.r.transpose());
  m.position = (x_true.p - state.xhat.p).norm();
  m.velocity = (x_true.v - state.xhat.v).norm();
  m.gravity = (g_true - state.g_hat).norm();
  return m;
}

bool in_unstable_set(const Rotation& rtilde, double tol) {
  return std::abs(rtilde.matrix().trace() + 1.0) <= tol;
}

}  // namespace se23nav
