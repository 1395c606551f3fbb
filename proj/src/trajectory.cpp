#include "se23nav/errors.hpp"
#include "se23nav/simulator.hpp"

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

namespace se23nav {

const char* to_string(TrajectoryKind kind) {
  switch (kind) {
    case TrajectoryKind::hover:
      return "hover";
    case TrajectoryKind::circle:
      return "circle";
    case TrajectoryKind::lissajous:
      return "lissajous";
    case TrajectoryKind::waypoints:
      return "waypoints";
  }
  return "unknown";
}

void TrajectorySpec::validate() const {
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw ValidationError("duration", "must be positive");
  }
  if (!center.allFinite()) {
    throw ValidationError("center", "must be finite");
  }
  switch (kind) {
    case TrajectoryKind::hover:
      break;
    case TrajectoryKind::circle:
      if (!(radius > 0.0)) {
        throw ValidationError("circle_radius", "must be positive");
      }
      if (!(angular_rate != 0.0) || !std::isfinite(angular_rate)) {
        throw ValidationError("circle_rate", "must be non-zero");
      }
      break;
    case TrajectoryKind::lissajous:
      // x and y at 1:2 never stop together, so the heading is always defined.
      if (!(amplitude.x() > 0.0) || !(amplitude.y() > 0.0) || !(amplitude.z() >= 0.0)) {
        throw ValidationError("lissajous_amplitude", "x and y must be positive, z non-negative");
      }
      if (!(frequency > 0.0)) {
        throw ValidationError("lissajous_frequency", "must be positive");
      }
      break;
    case TrajectoryKind::waypoints:
      if (waypoints.size() < 2) {
        throw ValidationError("waypoints", "need at least two waypoints");
      }
      if (waypoints.front().t != 0.0) {
        throw ValidationError("waypoints", "first waypoint must be at t = 0");
      }
      for (std::size_t i = 1; i < waypoints.size(); ++i) {
        if (!(waypoints[i].t > waypoints[i - 1].t)) {
          throw ValidationError("waypoints", "times must increase strictly");
        }
      }
      if (waypoints.back().t < duration) {
        throw ValidationError("waypoints", "last waypoint must not end before duration");
      }
      break;
  }
}

namespace {

struct Kinematics {
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 a = Vec3::Zero();  // inertial acceleration
};

/// Natural cubic spline through (t_i, x_i), one instance per axis.
class NaturalSpline {
 public:
  NaturalSpline(std::vector<double> t, std::vector<double> x) : t_(std::move(t)), x_(std::move(x)) {
    const std::size_t n = t_.size();
    m_.assign(n, 0.0);
    if (n < 3) {
      return;
    }
    // Thomas algorithm on the interior second derivatives.
    std::vector<double> c(n, 0.0), d(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = t_[i] - t_[i - 1];
      const double h1 = t_[i + 1] - t_[i];
      const double diag = 2.0 * (h0 + h1);
      const double rhs = 6.0 * ((x_[i + 1] - x_[i]) / h1 - (x_[i] - x_[i - 1]) / h0);
      const double denom = diag - h0 * c[i - 1];
      c[i] = h1 / denom;
      d[i] = (rhs - h0 * d[i - 1]) / denom;
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
      m_[i] = d[i] - c[i] * m_[i + 1];
    }
  }

  /// Value, first and second derivative at t.
  std::array<double, 3> eval(double t) const {
    std::size_t i = 0;
    while (i + 2 < t_.size() && t > t_[i + 1]) {
      ++i;
    }
    const double h = t_[i + 1] - t_[i];
    const double a = (t_[i + 1] - t) / h;
    const double b = (t - t_[i]) / h;
    const double value = a * x_[i] + b * x_[i + 1] +
                         ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
    const double slope = (x_[i + 1] - x_[i]) / h +
                         (-(3.0 * a * a - 1.0) * m_[i] + (3.0 * b * b - 1.0) * m_[i + 1]) * h / 6.0;
    const double curvature = a * m_[i] + b * m_[i + 1];
    return {value, slope, curvature};
  }

 private:
  std::vector<double> t_;
  std::vector<double> x_;
  std::vector<double> m_;
};

Kinematics evaluate(const TrajectorySpec& spec, double t,
                    const std::array<std::optional<NaturalSpline>, 3>& splines) {
  Kinematics k;
  switch (spec.kind) {
    case TrajectoryKind::hover:
      k.p = spec.center;
      break;
    case TrajectoryKind::circle: {
      const double w = spec.angular_rate;
      const double r = spec.radius;
      const double c = std::cos(w * t);
      const double s = std::sin(w * t);
      k.p = spec.center + r * Vec3(c, s, 0.0);
      k.v = r * w * Vec3(-s, c, 0.0);
      k.a = -r * w * w * Vec3(c, s, 0.0);
      break;
    }
    case TrajectoryKind::lissajous: {
      // x = Ax sin(wt), y = Ay sin(2wt), z = Az sin(3wt) about the center.
      const Vec3& amp = spec.amplitude;
      const double w = spec.frequency;
      for (int i = 0; i < 3; ++i) {
        const double wi = w * (i + 1);
        k.p(i) = spec.center(i) + amp(i) * std::sin(wi * t);
        k.v(i) = amp(i) * wi * std::cos(wi * t);
        k.a(i) = -amp(i) * wi * wi * std::sin(wi * t);
      }
      break;
    }
    case TrajectoryKind::waypoints:
      for (int i = 0; i < 3; ++i) {
        const auto [x, dx, ddx] = splines[i]->eval(t);
        k.p(i) = x;
        k.v(i) = dx;
        k.a(i) = ddx;
      }
      break;
  }
  return k;
}

}  // namespace

std::vector<TruthSample> generate_truth(const TrajectorySpec& spec, double rate, const Vec3& gravity) {
  spec.validate();
  if (!(rate > 0.0)) {
    throw ValidationError("imu_rate", "must be positive");
  }
  std::array<std::optional<NaturalSpline>, 3> splines;
  if (spec.kind == TrajectoryKind::waypoints) {
    std::vector<double> times;
    for (const Waypoint& wp : spec.waypoints) {
      times.push_back(wp.t);
    }
    for (int i = 0; i < 3; ++i) {
      std::vector<double> x;
      for (const Waypoint& wp : spec.waypoints) {
        x.push_back(wp.p(i));
      }
      splines[i].emplace(times, std::move(x));
    }
  }

  const std::int64_t dt_ns = std::llround(1e9 / rate);
  const std::int64_t end_ns = to_nanoseconds(spec.duration);
  std::vector<TruthSample> out;
  out.reserve(static_cast<std::size_t>(end_ns / dt_ns) + 1);
  for (std::int64_t ns = 0; ns <= end_ns; ns += dt_ns) {
    const double t = to_seconds(ns);
    const Kinematics k = evaluate(spec, t, splines);

    // Heading follows the horizontal velocity: psi = atan2(vy, vx),
    // psi_dot = (vx ay - vy ax) / (vx^2 + vy^2). Hover, or a stop along a
    // waypoint path, keeps the configured heading with zero rate.
    double yaw = spec.heading;
    double yaw_rate = 0.0;
    const double speed2 = k.v.x() * k.v.x() + k.v.y() * k.v.y();
    if (spec.kind != TrajectoryKind::hover && speed2 > 1e-12) {
      yaw = std::atan2(k.v.y(), k.v.x());
      yaw_rate = (k.v.x() * k.a.y() - k.v.y() * k.a.x()) / speed2;
    }
    const double c = std::cos(yaw);
    const double s = std::sin(yaw);
    Mat3 rz;
    rz << c, -s, 0.0,
          s, c, 0.0,
          0.0, 0.0, 1.0;

    TruthSample sample;
    sample.t = t;
    sample.x.r = Rotation::unchecked(rz);
    sample.x.p = k.p;
    sample.x.v = k.v;
    sample.omega = Vec3(0.0, 0.0, yaw_rate);
    sample.a = rz.transpose() * (k.a - gravity);
    out.push_back(sample);
  }
  return out;
}

}  // namespace se23nav
