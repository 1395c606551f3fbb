#pragma once

#include "se23nav/lie.hpp"
#include "se23nav/measurement.hpp"
#include "se23nav/quaternion.hpp"

#include <cstdint>
#include <variant>
#include <vector>

namespace se23nav {

/// Seconds <-> integer nanoseconds. Times are stored in seconds in memory and as
/// integer nanoseconds on disk; to_seconds(to_nanoseconds(t)) == t whenever t was
/// itself produced by to_seconds().
double to_seconds(std::int64_t ns);
std::int64_t to_nanoseconds(double t);

struct ImuSample {
  double t = 0.0;
  Vec3 omega_m = Vec3::Zero();
  Vec3 a_m = Vec3::Zero();
};

struct GroundTruthSample {
  double t = 0.0;
  Quat q;
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();

  NavState nav() const;
};

using StreamEvent = std::variant<ImuSample, LandmarkObservation, GroundTruthSample>;

double event_time(const StreamEvent& e);

/// Time-sorted merge of the input streams.
struct AlignedStream {
  std::vector<StreamEvent> events;
};

/// Stable merge by timestamp; at equal times IMU precedes landmark which precedes
/// ground truth. Throws EmptyStream if there is no IMU data, or no landmark data
/// while `require_observations` is set.
AlignedStream align(const std::vector<ImuSample>& imu, const std::vector<LandmarkObservation>& obs,
                    const std::vector<GroundTruthSample>& truth = {},
                    bool require_observations = true);

}  // namespace se23nav
