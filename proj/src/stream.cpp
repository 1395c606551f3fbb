#include "se23nav/stream.hpp"

#include "se23nav/errors.hpp"

#include <algorithm>
#include <cmath>

namespace se23nav {

double to_seconds(std::int64_t ns) { return static_cast<double>(ns) * 1e-9; }

std::int64_t to_nanoseconds(double t) { return std::llround(t * 1e9); }

NavState GroundTruthSample::nav() const {
  NavState x;
  x.r = quat_to_rot(q);
  x.p = p;
  x.v = v;
  return x;
}

double event_time(const StreamEvent& e) {
  return std::visit([](const auto& ev) { return ev.t; }, e);
}

AlignedStream align(const std::vector<ImuSample>& imu, const std::vector<LandmarkObservation>& obs,
                    const std::vector<GroundTruthSample>& truth, bool require_observations) {
  if (imu.empty()) {
    throw EmptyStream("no IMU samples");
  }
  if (require_observations && obs.empty()) {
    throw EmptyStream("no landmark observations");
  }
  AlignedStream out;
  out.events.reserve(imu.size() + obs.size() + truth.size());
  for (const auto& s : imu) {
    out.events.emplace_back(s);
  }
  for (const auto& s : obs) {
    out.events.emplace_back(s);
  }
  for (const auto& s : truth) {
    out.events.emplace_back(s);
  }
  // Variant index encodes the tie order imu < landmark < truth; stable_sort
  // keeps each stream's own order.
  std::stable_sort(out.events.begin(), out.events.end(), [](const StreamEvent& a, const StreamEvent& b) {
    const double ta = event_time(a);
    const double tb = event_time(b);
    if (ta != tb) {
      return ta < tb;
    }
    return a.index() < b.index();
  });
  return out;
}

}  // namespace se23nav
