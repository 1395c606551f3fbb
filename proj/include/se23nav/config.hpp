#pragma once

#include "se23nav/observer.hpp"
#include "se23nav/simulator.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace se23nav {

enum class ModeSelection { known, adaptive, both };

/// Accepts "known-gravity", "adaptive-gravity" or "both". Throws ValidationError.
ModeSelection parse_mode(const std::string& text);
std::vector<GravityMode> modes_of(ModeSelection selection);

/// Settings shared by simulate and replay. Relative paths in a config file are
/// resolved against the directory that holds the file.
struct RunConfig {
  Gains gains;
  ModeSelection mode = ModeSelection::known;
  Vec3 gravity = kDefaultGravity;

  TrajectorySpec trajectory;
  double imu_rate = 200.0;
  double landmark_rate = 20.0;
  NoiseSpec noise{0.12, 0.11, 1, {}};
  double landmark_noise = 0.0;
  // Initial estimation error; the angle is kept in degrees as written.
  Vec3 init_axis{1.0, 1.0, 1.0};
  double init_angle_deg = 170.0;
  Vec3 init_position{3.0, -2.0, 1.0};
  Vec3 init_velocity = Vec3::Zero();
  /// Monte-Carlo trials for simulate; seeds are seed, seed+1, ...
  std::size_t trials = 1;

  std::optional<std::filesystem::path> landmarks;  // map CSV; built-in map when absent
  std::optional<std::filesystem::path> imu_path;
  std::optional<std::filesystem::path> obs_path;
  std::optional<std::filesystem::path> truth_path;
  std::filesystem::path out_dir = "out";

  InitError init_error() const;
  /// The simulation scenario these settings describe (map not loaded here).
  Scenario scenario(GravityMode mode) const;
  /// Throws ValidationError.
  void validate() const;
};

/// Flat "key = value" lines; '#' starts a comment. Unknown or repeated keys and
/// malformed values raise ParseError(key, line); constraint violations raise
/// ValidationError(key, reason). Referenced input files must exist.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir);

/// Renders `config` so that parse_config_text reads it back unchanged.
/// Paths are written as given.
std::string render_config(const RunConfig& config);

}  // namespace se23nav
