#include "se23nav/config.hpp"

#include "se23nav/dataset_io.hpp"
#include "se23nav/errors.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string_view>
#include <system_error>

namespace se23nav {

namespace fs = std::filesystem;

ModeSelection parse_mode(const std::string& text) {
  if (text == "known-gravity") {
    return ModeSelection::known;
  }
  if (text == "adaptive-gravity") {
    return ModeSelection::adaptive;
  }
  if (text == "both") {
    return ModeSelection::both;
  }
  throw ValidationError("mode", "expected known-gravity, adaptive-gravity or both, got '" + text + "'");
}

std::vector<GravityMode> modes_of(ModeSelection selection) {
  switch (selection) {
    case ModeSelection::known:
      return {GravityMode::known};
    case ModeSelection::adaptive:
      return {GravityMode::adaptive};
    case ModeSelection::both:
      return {GravityMode::known, GravityMode::adaptive};
  }
  return {};
}

InitError RunConfig::init_error() const {
  InitError e;
  e.axis = init_axis;
  e.angle = init_angle_deg * std::numbers::pi / 180.0;
  e.position = init_position;
  e.velocity = init_velocity;
  return e;
}

Scenario RunConfig::scenario(GravityMode m) const {
  Scenario s;
  s.trajectory = trajectory;
  s.imu_rate = imu_rate;
  s.landmark_rate = landmark_rate;
  s.landmark_noise = landmark_noise;
  s.noise = noise;
  s.gains = gains;
  s.init = init_error();
  s.mode = m;
  s.gravity = gravity;
  return s;
}

void RunConfig::validate() const {
  gains.validate();
  trajectory.validate();
  if (!(noise.std_omega >= 0.0)) {
    throw ValidationError("std_omega", "must be non-negative");
  }
  if (!(noise.std_accel >= 0.0)) {
    throw ValidationError("std_accel", "must be non-negative");
  }
  if (!(init_axis.norm() > 0.0)) {
    throw ValidationError("init_att_axis", "must be non-zero");
  }
  if (trials == 0) {
    throw ValidationError("trials", "must be positive");
  }
  Scenario s = scenario(GravityMode::known);
  s.validate();
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct Value {
  std::string key;
  std::string text;
  std::size_t line;

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(key + ": " + what, line, key); }

  double number() const {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v)) {
      fail("expected a number, got '" + text + "'");
    }
    return v;
  }

  std::uint64_t unsigned_integer() const {
    std::uint64_t v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
      fail("expected a non-negative integer, got '" + text + "'");
    }
    return v;
  }

  std::vector<double> numbers() const {
    std::string spaced = text;
    for (char& c : spaced) {
      if (c == ',') {
        c = ' ';
      }
    }
    std::istringstream in(spaced);
    std::vector<double> out;
    std::string token;
    while (in >> token) {
      Value v{key, token, line};
      out.push_back(v.number());
    }
    return out;
  }

  Vec3 vec3() const {
    const std::vector<double> n = numbers();
    if (n.size() != 3) {
      fail("expected three numbers");
    }
    return {n[0], n[1], n[2]};
  }

  fs::path existing_path(const fs::path& base) const {
    if (text.empty()) {
      fail("empty path");
    }
    fs::path p(text);
    if (p.is_relative()) {
      p = base / p;
    }
    if (!fs::exists(p)) {
      throw ValidationError(key, "file not found: " + p.string());
    }
    return p;
  }
};

TrajectoryKind parse_kind(const Value& v) {
  for (TrajectoryKind k :
       {TrajectoryKind::hover, TrajectoryKind::circle, TrajectoryKind::lissajous, TrajectoryKind::waypoints}) {
    if (v.text == to_string(k)) {
      return k;
    }
  }
  v.fail("expected hover, circle, lissajous or waypoints");
}

/// "t x y z; t x y z; ..."
std::vector<Waypoint> parse_waypoints(const Value& v) {
  std::vector<Waypoint> out;
  std::string_view rest(v.text);
  while (!rest.empty()) {
    const auto semi = rest.find(';');
    const std::string_view item = trim(rest.substr(0, semi));
    rest = semi == std::string_view::npos ? std::string_view{} : rest.substr(semi + 1);
    if (item.empty()) {
      continue;
    }
    const std::vector<double> n = Value{v.key, std::string(item), v.line}.numbers();
    if (n.size() != 4) {
      v.fail("each waypoint needs four numbers: t x y z");
    }
    out.push_back({n[0], Vec3(n[1], n[2], n[3])});
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const Value&, const fs::path&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"k_w", [](RunConfig& c, const Value& v, const fs::path&) { c.gains.k_w = v.number(); }},
      {"k_v", [](RunConfig& c, const Value& v, const fs::path&) { c.gains.k_v = v.number(); }},
      {"k_a", [](RunConfig& c, const Value& v, const fs::path&) { c.gains.k_a = v.number(); }},
      {"gamma_sigma", [](RunConfig& c, const Value& v, const fs::path&) { c.gains.gamma_sigma = v.number(); }},
      {"k_sigma", [](RunConfig& c, const Value& v, const fs::path&) { c.gains.k_sigma = v.number(); }},
      {"gamma_g", [](RunConfig& c, const Value& v, const fs::path&) { c.gains.gamma_g = v.number(); }},
      {"mu", [](RunConfig& c, const Value& v, const fs::path&) { c.gains.mu = v.number(); }},
      {"mode", [](RunConfig& c, const Value& v, const fs::path&) { c.mode = parse_mode(v.text); }},
      {"gravity", [](RunConfig& c, const Value& v, const fs::path&) { c.gravity = v.vec3(); }},
      {"trajectory", [](RunConfig& c, const Value& v, const fs::path&) { c.trajectory.kind = parse_kind(v); }},
      {"duration", [](RunConfig& c, const Value& v, const fs::path&) { c.trajectory.duration = v.number(); }},
      {"center", [](RunConfig& c, const Value& v, const fs::path&) { c.trajectory.center = v.vec3(); }},
      {"heading", [](RunConfig& c, const Value& v, const fs::path&) { c.trajectory.heading = v.number(); }},
      {"circle_radius", [](RunConfig& c, const Value& v, const fs::path&) { c.trajectory.radius = v.number(); }},
      {"circle_rate", [](RunConfig& c, const Value& v, const fs::path&) { c.trajectory.angular_rate = v.number(); }},
      {"lissajous_amplitude",
       [](RunConfig& c, const Value& v, const fs::path&) { c.trajectory.amplitude = v.vec3(); }},
      {"lissajous_frequency",
       [](RunConfig& c, const Value& v, const fs::path&) { c.trajectory.frequency = v.number(); }},
      {"waypoints",
       [](RunConfig& c, const Value& v, const fs::path&) { c.trajectory.waypoints = parse_waypoints(v); }},
      {"imu_rate", [](RunConfig& c, const Value& v, const fs::path&) { c.imu_rate = v.number(); }},
      {"landmark_rate", [](RunConfig& c, const Value& v, const fs::path&) { c.landmark_rate = v.number(); }},
      {"std_omega", [](RunConfig& c, const Value& v, const fs::path&) { c.noise.std_omega = v.number(); }},
      {"std_accel", [](RunConfig& c, const Value& v, const fs::path&) { c.noise.std_accel = v.number(); }},
      {"landmark_noise", [](RunConfig& c, const Value& v, const fs::path&) { c.landmark_noise = v.number(); }},
      {"seed", [](RunConfig& c, const Value& v, const fs::path&) { c.noise.seed = v.unsigned_integer(); }},
      {"trials",
       [](RunConfig& c, const Value& v, const fs::path&) {
         c.trials = static_cast<std::size_t>(v.unsigned_integer());
       }},
      {"init_att_axis", [](RunConfig& c, const Value& v, const fs::path&) { c.init_axis = v.vec3(); }},
      {"init_att_angle_deg", [](RunConfig& c, const Value& v, const fs::path&) { c.init_angle_deg = v.number(); }},
      {"init_pos_offset", [](RunConfig& c, const Value& v, const fs::path&) { c.init_position = v.vec3(); }},
      {"init_vel_offset", [](RunConfig& c, const Value& v, const fs::path&) { c.init_velocity = v.vec3(); }},
      {"landmarks", [](RunConfig& c, const Value& v, const fs::path& b) { c.landmarks = v.existing_path(b); }},
      {"imu_path", [](RunConfig& c, const Value& v, const fs::path& b) { c.imu_path = v.existing_path(b); }},
      {"obs_path", [](RunConfig& c, const Value& v, const fs::path& b) { c.obs_path = v.existing_path(b); }},
      {"truth_path", [](RunConfig& c, const Value& v, const fs::path& b) { c.truth_path = v.existing_path(b); }},
      {"out_dir",
       [](RunConfig& c, const Value& v, const fs::path& b) {
         if (v.text.empty()) {
           v.fail("empty path");
         }
         const fs::path p(v.text);
         c.out_dir = p.is_relative() ? b / p : p;
       }},
  };
  return table;
}

std::string vec_text(const Vec3& v) {
  return format_double(v.x()) + ", " + format_double(v.y()) + ", " + format_double(v.z());
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const fs::path& base_dir) {
  RunConfig config;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s(raw);
    if (const auto hash = s.find('#'); hash != std::string_view::npos) {
      s = s.substr(0, hash);
    }
    s = trim(s);
    if (s.empty()) {
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("expected key = value", line);
    }
    const std::string key(trim(s.substr(0, eq)));
    const Value value{key, std::string(trim(s.substr(eq + 1))), line};
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw ParseError("unknown key '" + key + "'", line, key);
    }
    if (!seen.insert(key).second) {
      throw ParseError("duplicate key '" + key + "'", line, key);
    }
    it->second(config, value, base_dir);
  }
  config.validate();
  return config;
}

RunConfig parse_config(const fs::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const IoError&) {
    throw ValidationError("config", "cannot read " + path.string());
  }
  return parse_config_text(text, path.parent_path());
}

std::string render_config(const RunConfig& c) {
  std::ostringstream out;
  const char* mode = c.mode == ModeSelection::both ? "both" : c.mode == ModeSelection::known ? "known-gravity"
                                                                                              : "adaptive-gravity";
  out << "k_w = " << format_double(c.gains.k_w) << '\n'
      << "k_v = " << format_double(c.gains.k_v) << '\n'
      << "k_a = " << format_double(c.gains.k_a) << '\n'
      << "gamma_sigma = " << format_double(c.gains.gamma_sigma) << '\n'
      << "k_sigma = " << format_double(c.gains.k_sigma) << '\n'
      << "gamma_g = " << format_double(c.gains.gamma_g) << '\n'
      << "mu = " << format_double(c.gains.mu) << '\n'
      << "mode = " << mode << '\n'
      << "gravity = " << vec_text(c.gravity) << '\n'
      << "trajectory = " << to_string(c.trajectory.kind) << '\n'
      << "duration = " << format_double(c.trajectory.duration) << '\n'
      << "center = " << vec_text(c.trajectory.center) << '\n'
      << "heading = " << format_double(c.trajectory.heading) << '\n'
      << "circle_radius = " << format_double(c.trajectory.radius) << '\n'
      << "circle_rate = " << format_double(c.trajectory.angular_rate) << '\n'
      << "lissajous_amplitude = " << vec_text(c.trajectory.amplitude) << '\n'
      << "lissajous_frequency = " << format_double(c.trajectory.frequency) << '\n';
  if (!c.trajectory.waypoints.empty()) {
    out << "waypoints =";
    for (std::size_t i = 0; i < c.trajectory.waypoints.size(); ++i) {
      const Waypoint& w = c.trajectory.waypoints[i];
      out << (i == 0 ? " " : "; ") << format_double(w.t) << ' ' << format_double(w.p.x()) << ' '
          << format_double(w.p.y()) << ' ' << format_double(w.p.z());
    }
    out << '\n';
  }
  out << "imu_rate = " << format_double(c.imu_rate) << '\n'
      << "landmark_rate = " << format_double(c.landmark_rate) << '\n'
      << "std_omega = " << format_double(c.noise.std_omega) << '\n'
      << "std_accel = " << format_double(c.noise.std_accel) << '\n'
      << "landmark_noise = " << format_double(c.landmark_noise) << '\n'
      << "seed = " << c.noise.seed << '\n'
      << "trials = " << c.trials << '\n'
      << "init_att_axis = " << vec_text(c.init_axis) << '\n'
      << "init_att_angle_deg = " << format_double(c.init_angle_deg) << '\n'
      << "init_pos_offset = " << vec_text(c.init_position) << '\n'
      << "init_vel_offset = " << vec_text(c.init_velocity) << '\n';
  auto path_line = [&](const char* key, const std::optional<fs::path>& p) {
    if (p) {
      out << key << " = " << p->generic_string() << '\n';
    }
  };
  path_line("landmarks", c.landmarks);
  path_line("imu_path", c.imu_path);
  path_line("obs_path", c.obs_path);
  path_line("truth_path", c.truth_path);
  out << "out_dir = " << c.out_dir.generic_string() << '\n';
  return out.str();
}

}  // namespace se23nav
