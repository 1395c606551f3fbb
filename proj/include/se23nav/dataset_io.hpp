#pragma once

#include "se23nav/measurement.hpp"
#include "se23nav/simulator.hpp"
#include "se23nav/stream.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace se23nav {

// CSV logs. Every file starts with one header line; times are integer
// nanoseconds on disk. See FORMATS.md for the exact layouts.
//
//   imu           t_ns,wx,wy,wz,ax,ay,az          (EuRoC imu0 data.csv also accepted)
//   ground truth  t_ns,qw,qx,qy,qz,px,py,pz,vx,vy,vz
//                                                 (EuRoC state_groundtruth_estimate0 also accepted)
//   landmark map  id,px,py,pz,s
//   observations  t_ns,id,yx,yy,yz                (one reading per row, grouped by t_ns)

/// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);

/// Throws ParseError (with line number) or NonMonotonicTime.
std::vector<ImuSample> load_imu_csv(const std::filesystem::path& path);
std::vector<GroundTruthSample> load_truth_csv(const std::filesystem::path& path);
LandmarkMap load_map_csv(const std::filesystem::path& path);

/// Readings must reference ids in `map` (UnknownLandmarkId) and every epoch
/// needs at least three readings (InsufficientLandmarks).
std::vector<LandmarkObservation> load_observations_csv(const std::filesystem::path& path,
                                                       const LandmarkMap& map);

struct LandmarkData {
  LandmarkMap map;
  std::vector<LandmarkObservation> observations;
  ConfigReport report;
};

/// Map plus observations, with the landmark configuration check attached.
/// A map that fails the check still loads; callers inspect `report`.
LandmarkData load_landmarks(const std::filesystem::path& map_path, const std::filesystem::path& obs_path);

/// Writers throw IoError.
void write_imu_csv(const std::filesystem::path& path, const std::vector<ImuSample>& imu);
void write_truth_csv(const std::filesystem::path& path, const std::vector<GroundTruthSample>& truth);
void write_map_csv(const std::filesystem::path& path, const LandmarkMap& map);
void write_observations_csv(const std::filesystem::path& path, const std::vector<LandmarkObservation>& obs);

/// t,att_err,pos_err,vel_err,grav_err followed by the estimate columns
/// qw,qx,qy,qz,px,py,pz,vx,vy,vz,gx,gy,gz,sx,sy,sz. Without ground truth the
/// four error columns are omitted. t is in seconds.
void write_metrics(const RunResult& result, const std::filesystem::path& path);

struct MetricsTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

MetricsTable load_metrics_csv(const std::filesystem::path& path);

/// Whole-file read; throws IoError.
std::string read_file(const std::filesystem::path& path);

}  // namespace se23nav
