#include "se23nav/measurement.hpp"

#include "se23nav/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>
#include <utility>

namespace se23nav {

LandmarkMap::LandmarkMap(std::vector<Landmark> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const Landmark& lm = entries_[i];
    const std::string key = "landmark " + std::to_string(lm.id);
    if (!lm.p.allFinite()) {
      throw ValidationError(key, "position must be finite");
    }
    if (!(lm.s > 0.0) || !std::isfinite(lm.s)) {
      throw ValidationError(key, "confidence must be positive");
    }
    if (!index_.emplace(lm.id, i).second) {
      throw ValidationError(key, "duplicate id");
    }
  }
}

const Landmark* LandmarkMap::find(int id) const {
  const auto it = index_.find(id);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

const Landmark& LandmarkMap::at(int id) const {
  const Landmark* lm = find(id);
  if (lm == nullptr) {
    throw UnknownLandmarkId(id);
  }
  return *lm;
}

LandmarkObservation synthesize_observation(const NavState& x_true, const LandmarkMap& map,
                                           double noise_std, NormalRng& rng, double t) {
  LandmarkObservation obs;
  obs.t = t;
  obs.readings.reserve(map.size());
  const Mat3 rt = x_true.r.matrix().transpose();
  for (const Landmark& lm : map.entries()) {
    obs.readings.push_back({lm.id, rt * (lm.p - x_true.p) + rng.normal3(noise_std)});
  }
  return obs;
}

namespace {

struct Centroid {
  Vec3 p_c = Vec3::Zero();
  double s_t = 0.0;
  Mat3 m = Mat3::Zero();
};

template <typename PositionWeightRange>
Centroid centroid_and_scatter(const PositionWeightRange& items) {
  Centroid c;
  for (const auto& [p, s] : items) {
    c.p_c += s * p;
    c.s_t += s;
  }
  c.p_c /= c.s_t;
  for (const auto& [p, s] : items) {
    const Vec3 d = p - c.p_c;
    c.m += s * d * d.transpose();
  }
  c.m = 0.5 * (c.m + c.m.transpose());
  return c;
}

}  // namespace

MeasurementSummary aggregate(const LandmarkMap& map, const LandmarkObservation& obs,
                             const Rotation& rhat, const Vec3& phat) {
  if (obs.readings.size() < 3) {
    throw InsufficientLandmarks("need at least 3 landmark readings, got " +
                                std::to_string(obs.readings.size()));
  }
  std::vector<std::pair<Vec3, double>> items;
  items.reserve(obs.readings.size());
  for (const LandmarkReading& rd : obs.readings) {
    const Landmark& lm = map.at(rd.id);
    items.emplace_back(lm.p, lm.s);
  }
  const Centroid c = centroid_and_scatter(items);

  MeasurementSummary out;
  out.p_c = c.p_c;
  out.s_t = c.s_t;
  out.m = c.m;
  const Mat3& r = rhat.matrix();
  Vec3 eps = Vec3::Zero();
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& [p, s] = items[i];
    const Vec3& y = obs.readings[i].y;
    const Vec3 ry = r * y;
    out.m_rtilde += s * (p - c.p_c) * ry.transpose();
    eps += s * (p - ry - phat);
  }
  out.rtp_eps = eps / c.s_t;
  out.dist_m = 0.25 * (out.m - out.m_rtilde).trace();
  return out;
}

Vec3 symmetric_eigenvalues(const Mat3& m) {
  Eigen::SelfAdjointEigenSolver<Mat3> solver;
  solver.computeDirect(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

ConfigReport check_configuration(const LandmarkMap& map) {
  ConfigReport report;
  report.landmark_count = map.size();
  if (map.size() == 0) {
    report.violates_assumption = true;
    report.reason = "no landmarks";
    return report;
  }
  std::vector<std::pair<Vec3, double>> items;
  for (const Landmark& lm : map.entries()) {
    items.emplace_back(lm.p, lm.s);
  }
  const Centroid c = centroid_and_scatter(items);
  report.eigenvalues_m = symmetric_eigenvalues(c.m);
  const Mat3 mbar = c.m.trace() * Mat3::Identity() - c.m;
  const Vec3 mbar_eig = symmetric_eigenvalues(mbar);
  report.lambda_min_mbar = mbar_eig(0);
  report.lambda_max_mbar = mbar_eig(2);

  const double tol = 1e-9 * report.eigenvalues_m(2);
  if (map.size() < 3) {
    report.violates_assumption = true;
    report.reason = "fewer than three landmarks (" + std::to_string(map.size()) + ")";
  } else if (report.eigenvalues_m(0) + report.eigenvalues_m(1) <= tol) {
    report.violates_assumption = true;
    report.reason = "landmarks are collinear";
  }
  return report;
}

}  // namespace se23nav
