#pragma once

#include "se23nav/lie.hpp"
#include "se23nav/measurement.hpp"
#include "se23nav/observer.hpp"
#include "se23nav/stream.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace se23nav {

inline const Vec3 kDefaultGravity{0.0, 0.0, -9.81};  // ENU

enum class TrajectoryKind { hover, circle, lissajous, waypoints };

const char* to_string(TrajectoryKind kind);

struct Waypoint {
  double t = 0.0;
  Vec3 p = Vec3::Zero();
};

/// Analytic ground-truth trajectory. Attitude is yaw-follows-velocity for the
/// moving kinds (heading = atan2(Vy, Vx), level roll and pitch), fixed for hover.
struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::lissajous;
  double duration = 40.0;               // s
  Vec3 center{0.0, 0.0, 1.5};           // m
  double heading = 0.0;                 // rad, hover only
  double radius = 1.0;                  // m, circle
  double angular_rate = 1.0;            // rad/s, circle
  Vec3 amplitude{3.0, 2.0, 0.5};        // m, lissajous
  double frequency = 0.3;               // rad/s, lissajous base rate
  std::vector<Waypoint> waypoints;      // natural cubic spline through these

  /// Throws ValidationError.
  void validate() const;
};

struct TruthSample {
  double t = 0.0;
  NavState x;
  Vec3 omega = Vec3::Zero();  // body rate, rad/s
  Vec3 a = Vec3::Zero();      // body specific force R^T (Vdot - g), m/s^2
};

/// Samples at t_k = k / rate (on the integer-nanosecond grid) for t_k <= duration.
std::vector<TruthSample> generate_truth(const TrajectorySpec& spec, double rate,
                                        const Vec3& gravity = kDefaultGravity);

/// Per-axis Gaussian IMU noise. `profile`, when set, scales both stds as a function of t.
struct NoiseSpec {
  double std_omega = 0.0;  // rad/s
  double std_accel = 0.0;  // m/s^2
  std::uint64_t seed = 1;
  std::function<double(double)> profile;
};

std::vector<ImuSample> synthesize_imu(const std::vector<TruthSample>& truth, const NoiseSpec& noise);

/// Initial estimation error: Rhat(0) = R~(0)^T R(0) with R~(0) a rotation of
/// `angle` about `axis`, Phat(0) = P(0) - position, Vhat(0) = V(0) - velocity.
struct InitError {
  Vec3 axis{1.0, 1.0, 1.0};
  double angle = 0.0;  // rad
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();

  static InitError none() { return {}; }
  /// 170 degrees about [1,1,1]/sqrt(3), position offset [3,-2,1] m, no velocity offset.
  static InitError reference();
};

/// Six landmarks in general position inside a 10 m box around the default trajectory.
LandmarkMap default_landmark_map();

struct Scenario {
  TrajectorySpec trajectory;
  double imu_rate = 200.0;
  double landmark_rate = 20.0;
  LandmarkMap map = default_landmark_map();
  double landmark_noise = 0.0;
  NoiseSpec noise;
  Gains gains;
  InitError init = InitError::reference();
  GravityMode mode = GravityMode::known;
  Vec3 gravity = kDefaultGravity;

  void validate() const;
};

/// Everything a recorded log would hold.
struct SimulatedLogs {
  std::vector<ImuSample> imu;
  std::vector<LandmarkObservation> observations;
  std::vector<GroundTruthSample> truth;
  LandmarkMap map;
};

/// Ground truth, noisy IMU and landmark observations (every imu_rate/landmark_rate
/// IMU samples). Truth attitude is stored as a quaternion exactly as it is logged.
SimulatedLogs simulate_logs(const Scenario& scenario);

struct RunSetup {
  Gains gains;
  GravityMode mode = GravityMode::known;
  Vec3 gravity = kDefaultGravity;
  InitError init;
};

struct ConvergenceThresholds {
  double attitude = 0.01;
  double position = 0.05;
  double velocity = 0.05;
  double gravity = 0.2;
};

struct EstimateRow {
  double t = 0.0;
  std::optional<Metrics> metrics;
  Quat q;
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 g_hat = Vec3::Zero();
  Vec3 sigma_hat = Vec3::Zero();
};

struct RunSummary {
  Metrics initial;
  Metrics final;
  /// Mean of squared errors over the last 20% of the rows.
  Metrics steady_state_ms;
  /// Time after which each metric (attitude, position, velocity, gravity) stays
  /// below its threshold; empty if it never settles.
  std::array<std::optional<double>, 4> convergence_time;
};

struct RunResult {
  GravityMode mode = GravityMode::known;
  std::vector<EstimateRow> rows;
  ObserverState final_state;
  std::optional<RunSummary> summary;  // only with ground truth
  std::vector<std::string> warnings;
};

/// Replays an aligned stream through the observer. Each IMU sample drives one
/// step to the next IMU time; a landmark observation stamped within that
/// interval triggers the correction, otherwise only the prediction runs.
/// The initial estimate is the first ground-truth sample perturbed by
/// `setup.init`, or identity when there is no ground truth.
/// Throws InsufficientLandmarks if the map fails the landmark configuration check.
RunResult run_stream(const AlignedStream& stream, const LandmarkMap& map, const RunSetup& setup,
                     const ConvergenceThresholds& thresholds = {});

/// simulate_logs + align + run_stream.
RunResult run_closed_loop(const Scenario& scenario, const ConvergenceThresholds& thresholds = {});

RunSummary summarize(const std::vector<EstimateRow>& rows, const ConvergenceThresholds& thresholds);

struct MonteCarloTrial {
  std::uint64_t seed = 0;
  RunSummary summary;
};

/// One closed-loop run per seed, evaluated concurrently; results sorted by seed.
std::vector<MonteCarloTrial> run_monte_carlo(const Scenario& scenario,
                                             const std::vector<std::uint64_t>& seeds,
                                             const ConvergenceThresholds& thresholds = {});

}  // namespace se23nav
