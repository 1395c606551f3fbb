#include "se23nav/errors.hpp"
#include "se23nav/observer.hpp"
#include "se23nav/selftest.hpp"
#include "se23nav/simulator.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace se23nav {
namespace {

constexpr double kPi = std::numbers::pi;

LandmarkObservation exact(const NavState& x, const LandmarkMap& map) {
  NormalRng unused(0);
  return synthesize_observation(x, map, 0.0, unused);
}

/// Summary whose upsilon(m_rtilde) is `y`, with the other fields as given.
MeasurementSummary hand_summary(const Vec3& y, double dist, const Vec3& rtp_eps, const Vec3& p_c) {
  MeasurementSummary s;
  s.m_rtilde = skew(y);
  s.dist_m = dist;
  s.rtp_eps = rtp_eps;
  s.p_c = p_c;
  s.s_t = 1.0;
  return s;
}

TEST(ComputeCorrections, ZeroErrorFixedPoint) {
  const LandmarkMap map = default_landmark_map();
  const NavState x{Rotation::from_matrix(test::rz(0.7)), Vec3(1, 2, 3), Vec3(0.5, 0, 0)};
  const MeasurementSummary s = aggregate(map, exact(x, map), x.r, x.p);
  const Gains g;
  const Correction c = compute_corrections(s, ObserverState::with_known_gravity(x, kDefaultGravity), g);
  EXPECT_LT(c.w_omega.norm(), 1e-12);
  EXPECT_LT(c.w_v.norm(), 1e-11);
  EXPECT_LT((c.w_a + kDefaultGravity).norm(), 1e-11);
  EXPECT_NEAR(c.k_r, g.gamma_sigma / 4.0, 1e-11);
}

TEST(ComputeCorrections, AdaptiveTermGatedBySigma) {
  const MeasurementSummary s = hand_summary(Vec3(0.3, -0.2, 0.1), 0.4, Vec3::Zero(), Vec3::Zero());
  ObserverState st = ObserverState::with_known_gravity(NavState::identity(), kDefaultGravity);
  const Gains g;
  const Correction c = compute_corrections(s, st, g);
  EXPECT_EQ(c.w_omega, -g.k_w * 1.4 * Vec3(0.3, -0.2, 0.1));
  st.sigma_hat = Vec3(1, 2, 3);
  EXPECT_NE(compute_corrections(s, st, g).w_omega, c.w_omega);
}

TEST(ComputeCorrections, HandEvaluatedExample) {
  const MeasurementSummary s = hand_summary(Vec3(0.1, 0, 0), 0.2, Vec3(0, 0.5, 0), Vec3(1, 1, 1));
  const ObserverState st = ObserverState::with_known_gravity(NavState::identity(), Vec3(0, 0, -9.81));
  const Gains g;  // k_w=3, k_v=10, k_a=10, gamma_sigma=3, k_sigma=0.1
  const Correction c = compute_corrections(s, st, g);
  EXPECT_LT((c.w_omega - Vec3(-0.36, 0, 0)).norm(), 1e-15);
  EXPECT_LT((c.w_v - (Vec3(1, 1, 1).cross(Vec3(-0.36, 0, 0)) - Vec3(0, 5, 0))).norm(), 1e-14);
  EXPECT_LT((c.w_a - Vec3(0, -5, 9.81)).norm(), 1e-14);
  EXPECT_NEAR(c.k_r, 3.0 * (2.2 / 8.0) * std::exp(0.2), 1e-15);
}

TEST(SigmaStep, Examples) {
  const Gains g;
  ObserverState st = ObserverState::with_known_gravity(NavState::identity(), kDefaultGravity);
  Correction c;
  c.k_r = 1.0;

  st.sigma_hat = Vec3(1, -2, 3);
  const Vec3 decay = sigma_step(st, hand_summary(Vec3::Zero(), 0, Vec3::Zero(), Vec3::Zero()), c, g, 0.005);
  EXPECT_LT((decay - 0.9985 * st.sigma_hat).norm(), 1e-15);

  st.sigma_hat = Vec3::Zero();
  const Vec3 drive = sigma_step(st, hand_summary(Vec3(1, 2, 3), 0, Vec3::Zero(), Vec3::Zero()), c, g, 0.01);
  EXPECT_LT((drive - 0.01 * Vec3(1, 4, 9)).norm(), 1e-15);
}

TEST(GravityStep, Examples) {
  Gains g;
  g.mu = 1.0;
  g.gamma_g = 2.0;
  ObserverState st = ObserverState::with_adaptive_gravity(NavState::identity(), Vec3(0, 0, -9.81));
  Correction c;
  EXPECT_EQ(gravity_step(st, c, hand_summary(Vec3::Zero(), 0, Vec3::Zero(), Vec3::Zero()), g, 0.005), st.g_hat);

  const Vec3 next = gravity_step(st, c, hand_summary(Vec3::Zero(), 0, Vec3(0.1, 0, 0), Vec3::Zero()), g, 0.005);
  EXPECT_LT((next - Vec3(0.001, 0, -9.81)).norm(), 1e-15);

  c.w_omega = Vec3(0.3, -0.4, 0.2);
  const double dt = 1e-3;
  const Vec3 rotated = gravity_step(st, c, hand_summary(Vec3::Zero(), 0, Vec3::Zero(), Vec3::Zero()), g, dt);
  EXPECT_LT(std::abs(rotated.norm() - st.g_hat.norm()), 10.0 * dt * dt * c.w_omega.squaredNorm() * 9.81);
}

TEST(GravityStep, KnownModeRejected) {
  const ObserverState st = ObserverState::with_known_gravity(NavState::identity(), kDefaultGravity);
  EXPECT_THROW(gravity_step(st, Correction{}, MeasurementSummary{}, Gains{}, 0.005), ModeError);
}

TEST(Step, HoverIsFixedPoint) {
  const LandmarkMap map = default_landmark_map();
  const NavState x{Rotation::from_matrix(test::rz(0.3)), Vec3(0, 0, 1.5), Vec3::Zero()};
  const ImuReading imu{Vec3::Zero(), -(x.r.transpose() * kDefaultGravity)};
  const LandmarkObservation obs = exact(x, map);
  ObserverState st = ObserverState::with_known_gravity(x, kDefaultGravity);
  for (int k = 0; k < 2000; ++k) {
    st = step(st, imu, map, obs, Gains{}, 0.005);
  }
  EXPECT_LT((st.xhat.matrix() - x.matrix()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(st.sigma_hat.norm(), 1e-12);
}

struct Truth {
  Mat3 r;
  Vec3 p;
  Vec3 v;
};

Truth derivative(const Truth& x, const Vec3& omega, const Vec3& a, const Vec3& g) {
  return {x.r * skew(omega), x.v, x.r * a + g};
}

Truth advance(const Truth& x, const Truth& d, double h) { return {x.r + h * d.r, x.p + h * d.p, x.v + h * d.v}; }

/// Classical RK4 on the true kinematics with many substeps.
Truth rk4(Truth x, const Vec3& omega, const Vec3& a, const Vec3& g, double t, int substeps) {
  const double h = t / substeps;
  for (int i = 0; i < substeps; ++i) {
    const Truth k1 = derivative(x, omega, a, g);
    const Truth k2 = derivative(advance(x, k1, h / 2), omega, a, g);
    const Truth k3 = derivative(advance(x, k2, h / 2), omega, a, g);
    const Truth k4 = derivative(advance(x, k3, h), omega, a, g);
    x.r += h / 6 * (k1.r + 2 * k2.r + 2 * k3.r + k4.r);
    x.p += h / 6 * (k1.p + 2 * k2.p + 2 * k3.p + k4.p);
    x.v += h / 6 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v);
  }
  return x;
}

TEST(Step, ExactStateTracksTrueDynamics) {
  const LandmarkMap map = default_landmark_map();
  NormalRng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const NavState x{test::random_rotation(rng), rng.normal3(1.0), rng.normal3(1.0)};
    const Vec3 omega = rng.normal3(1.0);
    const Vec3 a = rng.normal3(3.0);
    const double dt = 0.005;
    const Truth t1 = rk4({x.r.matrix(), x.p, x.v}, omega, a, kDefaultGravity, dt, 50);
    const NavState truth_next{Rotation::from_matrix(t1.r, 1e-8), t1.p, t1.v};
    const ObserverState st =
        step(ObserverState::with_known_gravity(x, kDefaultGravity), {omega, a}, map, exact(truth_next, map), Gains{}, dt);
    const Metrics m = error_metrics(truth_next, st, kDefaultGravity);
    ASSERT_LT(m.attitude, dt * dt);
    ASSERT_LT(m.position, dt * dt);
    ASSERT_LT(m.velocity, dt * dt);
  }
}

TEST(Step, TooFewLandmarks) {
  const LandmarkMap map({{1, Vec3(1, 0, 0), 1}, {2, Vec3(0, 1, 0), 1}});
  const ObserverState st = ObserverState::with_known_gravity(NavState::identity(), kDefaultGravity);
  EXPECT_THROW(step(st, {}, map, exact(NavState::identity(), map), Gains{}, 0.005), InsufficientLandmarks);
  LandmarkObservation none;
  EXPECT_THROW(step(st, {}, default_landmark_map(), none, Gains{}, 0.005), InsufficientLandmarks);
}

TEST(Step, RotationStaysOrthonormal) {
  const LandmarkMap map = default_landmark_map();
  const NavState truth{Rotation(), Vec3(0, 0, 1.5), Vec3::Zero()};
  const LandmarkObservation obs = exact(truth, map);
  NormalRng rng(42);
  ObserverState st = ObserverState::with_known_gravity(
      NavState{Rotation::about_axis(Vec3(1, 2, 3), 2.0), Vec3(1, -1, 0), Vec3::Zero()}, kDefaultGravity);
  double worst = 0.0;
  for (int k = 0; k < 100000; ++k) {
    const ImuReading imu{rng.normal3(2.0), rng.normal3(5.0)};
    st = k % 10 == 9 ? step(st, imu, map, obs, Gains{}, 0.005) : predict(st, imu, 0.005);
    worst = std::max(worst, st.xhat.r.orthonormality_error());
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(Step, SigmaStaysBounded) {
  const LandmarkMap map = default_landmark_map();
  const Gains g;
  const double c = g.k_sigma * g.gamma_sigma;
  const double dt = 0.005;
  NormalRng rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    const NavState truth{test::random_rotation(rng), rng.normal3(1.0), Vec3::Zero()};
    const LandmarkObservation obs = exact(truth, map);
    ObserverState st = ObserverState::with_known_gravity(
        NavState{test::random_rotation(rng), rng.normal3(2.0), Vec3::Zero()}, kDefaultGravity);
    st.sigma_hat = rng.normal3(1.0);
    const double sigma0 = st.sigma_hat.norm();
    double drive = 0.0;
    for (int k = 0; k < 2000; ++k) {
      ObserverState probe = st;
      probe.sigma_hat = Vec3::Zero();
      const MeasurementSummary s = aggregate(map, obs, st.xhat.r, st.xhat.p);
      drive = std::max(drive, sigma_step(probe, s, compute_corrections(s, st, g), g, dt).norm() / dt);
      st = step(st, {}, map, obs, g, dt);
      ASSERT_LE(st.sigma_hat.norm(), drive / c + sigma0 + 1e-9);
    }
  }
}

TEST(UnstableSet, HalfTurnsAboutAxesDetected) {
  for (const Vec3& d : {Vec3(1, -1, -1), Vec3(-1, 1, -1), Vec3(-1, -1, 1)}) {
    EXPECT_TRUE(in_unstable_set(Rotation::from_matrix(d.asDiagonal().toDenseMatrix())));
  }
  EXPECT_TRUE(in_unstable_set(Rotation::about_axis(Vec3(1, 2, 3), kPi)));
  EXPECT_FALSE(in_unstable_set(Rotation::about_axis(Vec3(1, 1, 1), 170.0 * kPi / 180.0)));
  EXPECT_FALSE(in_unstable_set(Rotation()));
}

TEST(ErrorMetrics, Examples) {
  const NavState x{Rotation::from_matrix(test::rz(0.2)), Vec3(1, 2, 3), Vec3(0, 1, 0)};
  const Metrics zero = error_metrics(x, ObserverState::with_known_gravity(x, kDefaultGravity), kDefaultGravity);
  EXPECT_EQ(zero.position, 0.0);
  EXPECT_NEAR(zero.attitude, 0.0, 1e-16);
  EXPECT_EQ(zero.gravity, 0.0);

  NavState shifted = x;
  shifted.p += Vec3(3, 4, 0);
  EXPECT_DOUBLE_EQ(error_metrics(x, ObserverState::with_known_gravity(shifted, kDefaultGravity), kDefaultGravity).position, 5.0);

  NavState flipped = x;
  flipped.r = x.r * Rotation::from_matrix(test::rz(kPi));
  EXPECT_NEAR(error_metrics(x, ObserverState::with_known_gravity(flipped, kDefaultGravity), kDefaultGravity).attitude, 1.0,
              1e-15);
}

TEST(Gains, Validation) {
  EXPECT_NO_THROW(Gains{}.validate());
  Gains g;
  g.k_a = 0.0;
  EXPECT_THROW(g.validate(), ValidationError);
  g = Gains{};
  g.mu = std::nan("");
  EXPECT_THROW(g.validate(), ValidationError);
}

TEST(QuaternionObserver, IdleIdentityUnchanged) {
  QuatObserverState q = QuatObserverState::from(ObserverState::with_known_gravity(NavState::identity(), Vec3::Zero()));
  q = predict_quaternion(q, {}, 0.005);
  EXPECT_EQ(q.q.w, 1.0);
  EXPECT_EQ(q.q.v, Vec3::Zero());
}

TEST(QuaternionObserver, PurePredictionQuarterTurn) {
  QuatObserverState q = QuatObserverState::from(ObserverState::with_known_gravity(NavState::identity(), Vec3::Zero()));
  for (int k = 0; k < 10000; ++k) {
    q = predict_quaternion(q, {Vec3(0, 0, kPi / 2), Vec3::Zero()}, 1e-4);
  }
  EXPECT_LT((quat_to_rot(q.q).matrix() - test::rz(kPi / 2)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(QuaternionObserver, MatchesMatrixFormOverThousandSteps) {
  for (GravityMode mode : {GravityMode::known, GravityMode::adaptive}) {
    Scenario sc;
    sc.mode = mode;
    sc.noise = {0.12, 0.11, 3, {}};
    sc.trajectory.duration = 5.5;
    const EquivalenceReport r = compare_observer_forms(sc, 1000);
    EXPECT_EQ(r.steps, 1000u);
    EXPECT_LT(r.attitude, 1e-8);
    EXPECT_LT(r.position, 1e-7);
    EXPECT_LT(r.velocity, 1e-7);
  }
}

TEST(QuaternionObserver, RoundTripThroughObserverState) {
  ObserverState s = ObserverState::with_adaptive_gravity(
      NavState{Rotation::about_axis(Vec3(0, 1, 0), 0.4), Vec3(1, 2, 3), Vec3(4, 5, 6)}, Vec3(0, 0, -1));
  s.sigma_hat = Vec3(0.1, 0.2, 0.3);
  const ObserverState back = QuatObserverState::from(s).as_observer_state();
  EXPECT_LT((back.xhat.matrix() - s.xhat.matrix()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(back.sigma_hat, s.sigma_hat);
  EXPECT_EQ(back.g_hat, s.g_hat);
  EXPECT_EQ(back.mode, GravityMode::adaptive);
}

}  // namespace
}  // namespace se23nav
