#pragma once

#include "se23nav/lie.hpp"
#include "se23nav/measurement.hpp"
#include "se23nav/quaternion.hpp"

#include <cstdint>

namespace se23nav {

/// Observer design parameters. Defaults are the experiment gains
/// (k_w=3, k_v=10, k_a=10, gamma_sigma=3, gamma_g=2, k_sigma=0.1); mu defaults to 1.
struct Gains {
  double k_w = 3.0;
  double k_v = 10.0;
  double k_a = 10.0;
  double gamma_sigma = 3.0;
  double k_sigma = 0.1;
  double gamma_g = 2.0;
  double mu = 1.0;

  /// Fault injection for the self-test: negates w_Omega. Never set in normal use.
  bool debug_flip_w_omega = false;

  /// Throws ValidationError naming the first non-positive or non-finite gain.
  void validate() const;
};

enum class GravityMode { known, adaptive };

const char* to_string(GravityMode mode);

struct ObserverState {
  NavState xhat;
  Vec3 sigma_hat = Vec3::Zero();
  /// Gravity estimate; in known mode it is held at the supplied gravity.
  Vec3 g_hat = Vec3::Zero();
  GravityMode mode = GravityMode::known;
  /// Completed steps; drives periodic re-orthonormalization of Rhat.
  std::uint64_t steps = 0;

  static ObserverState with_known_gravity(const NavState& xhat, const Vec3& gravity);
  static ObserverState with_adaptive_gravity(const NavState& xhat, const Vec3& g0 = Vec3::Zero());
};

struct ImuReading {
  Vec3 omega_m = Vec3::Zero();  // rad/s
  Vec3 a_m = Vec3::Zero();      // m/s^2, specific force
};

struct Correction {
  Vec3 w_omega = Vec3::Zero();
  Vec3 w_v = Vec3::Zero();
  Vec3 w_a = Vec3::Zero();
  double k_r = 0.0;

  /// W = u([w_omega]x, w_v, w_a, 1)
  TangentElement as_tangent() const { return {w_omega, w_v, w_a, 1.0}; }
};

/// Re-orthonormalize Rhat after this many steps.
inline constexpr std::uint64_t kReorthonormalizeEvery = 1000;

/// Correction terms for the current (predicted) estimate in `state`:
///   w_omega = -k_w (d+1) Y - (1/4) (d+2)/(d+1) Rhat diag(Rhat^T Y) sigma_hat
///   w_v     = [p_c]x w_omega - k_v rtp_eps
///   w_a     = -g_hat - k_a rtp_eps
///   k_r     = gamma_sigma (d+2)/8 exp(d)
/// with Y = upsilon(M R~) and d = ||M R~||_I.
Correction compute_corrections(const MeasurementSummary& summary, const ObserverState& state,
                               const Gains& gains);

/// Explicit Euler on the covariance-bound adaptation:
/// sigma + dt k_r diag(Rhat^T Y) Rhat^T Y - dt k_sigma gamma_sigma sigma.
Vec3 sigma_step(const ObserverState& state, const MeasurementSummary& summary,
                const Correction& corr, const Gains& gains, double dt);

/// Explicit Euler on g_hat' = -[w_omega]x g_hat + mu gamma_g rtp_eps.
/// Throws ModeError in known-gravity mode.
Vec3 gravity_step(const ObserverState& state, const Correction& corr,
                  const MeasurementSummary& summary, const Gains& gains, double dt);

/// One discrete observer step with a landmark observation taken at the end of
/// the interval: predict Xhat exp(U_m dt), aggregate at the prediction, adapt
/// g_hat and sigma_hat, then correct with exp(-W dt).
/// Throws InsufficientLandmarks, UnknownLandmarkId or NonFiniteState.
ObserverState step(const ObserverState& state, const ImuReading& imu, const LandmarkMap& map,
                   const LandmarkObservation& obs, const Gains& gains, double dt);

/// Step without a landmark observation: the prediction plus gravity compensation
/// (W reduced to u(0, 0, -g_hat, 1)); sigma_hat and g_hat are held.
ObserverState predict(const ObserverState& state, const ImuReading& imu, double dt);

/// Observer with the attitude carried as a unit quaternion.
struct QuatObserverState {
  Quat q;
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 sigma_hat = Vec3::Zero();
  Vec3 g_hat = Vec3::Zero();
  GravityMode mode = GravityMode::known;

  static QuatObserverState from(const ObserverState& s);
  NavState nav() const;
  ObserverState as_observer_state() const;
};

/// Quaternion counterpart of step(): Q' = Q (x) exp(Omega_m dt), then
/// Q'' = exp(-w_omega dt) (x) Q', with P and V advanced by the closed-form
/// exponential blocks. Q is renormalized every step.
QuatObserverState step_quaternion(const QuatObserverState& state, const ImuReading& imu,
                                  const LandmarkMap& map, const LandmarkObservation& obs,
                                  const Gains& gains, double dt);

QuatObserverState predict_quaternion(const QuatObserverState& state, const ImuReading& imu,
                                     double dt);

struct Metrics {
  double attitude = 0.0;  // ||R Rhat^T||_I
  double position = 0.0;  // ||P - Phat||
  double velocity = 0.0;  // ||V - Vhat||
  double gravity = 0.0;   // ||g - g_hat||
};

Metrics error_metrics(const NavState& x_true, const ObserverState& state, const Vec3& g_true);

/// True when Tr{R~} is within `tol` of -1 (180 degree attitude error).
bool in_unstable_set(const Rotation& rtilde, double tol = 1e-6);

}  // namespace se23nav
