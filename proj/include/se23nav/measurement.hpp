#pragma once

#include "se23nav/lie.hpp"
#include "se23nav/random.hpp"

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

namespace se23nav {

/// Inertial-frame landmark with confidence weight s > 0.
struct Landmark {
  int id = 0;
  Vec3 p = Vec3::Zero();
  double s = 1.0;
};

class LandmarkMap {
 public:
  LandmarkMap() = default;
  /// Throws ValidationError on duplicate ids, non-finite positions or s <= 0.
  explicit LandmarkMap(std::vector<Landmark> entries);

  const std::vector<Landmark>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  const Landmark* find(int id) const;
  /// Throws UnknownLandmarkId.
  const Landmark& at(int id) const;

 private:
  std::vector<Landmark> entries_;
  std::unordered_map<int, std::size_t> index_;
};

struct LandmarkReading {
  int id = 0;
  Vec3 y = Vec3::Zero();  // body frame
};

struct LandmarkObservation {
  double t = 0.0;
  std::vector<LandmarkReading> readings;
};

/// Weighted landmark aggregates evaluated against an estimate (Rhat, Phat).
struct MeasurementSummary {
  Vec3 p_c = Vec3::Zero();        // weighted centroid
  double s_t = 0.0;               // total weight
  Mat3 m = Mat3::Zero();          // weighted scatter about p_c (symmetric)
  Mat3 m_rtilde = Mat3::Zero();   // sum s_i (p_i - p_c) y_i^T Rhat^T, equals M R~ noise-free
  Vec3 rtp_eps = Vec3::Zero();    // (1/s_T) sum s_i (p_i - Rhat y_i - Phat)
  double dist_m = 0.0;            // Tr{M - m_rtilde} / 4
};

struct ConfigReport {
  std::size_t landmark_count = 0;
  Vec3 eigenvalues_m = Vec3::Zero();  // ascending
  double lambda_min_mbar = 0.0;       // Mbar = Tr{M} I - M
  double lambda_max_mbar = 0.0;
  bool violates_assumption = false;   // fewer than 3 or collinear landmarks
  std::string reason;
};

/// y_i = R^T (p_i - P) + n_i for every landmark in the map.
LandmarkObservation synthesize_observation(const NavState& x_true, const LandmarkMap& map,
                                           double noise_std, NormalRng& rng, double t = 0.0);

/// Throws InsufficientLandmarks (< 3 readings) or UnknownLandmarkId.
MeasurementSummary aggregate(const LandmarkMap& map, const LandmarkObservation& obs,
                             const Rotation& rhat, const Vec3& phat);

ConfigReport check_configuration(const LandmarkMap& map);

/// Eigenvalues of a symmetric 3x3 matrix, ascending, by the closed-form
/// characteristic-polynomial method.
Vec3 symmetric_eigenvalues(const Mat3& m);

}  // namespace se23nav
