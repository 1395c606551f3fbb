#include "se23nav/config.hpp"
#include "se23nav/errors.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <numbers>

namespace se23nav {
namespace {

namespace fs = std::filesystem;

RunConfig parse(const std::string& text) { return parse_config_text(text, fs::path()); }

TEST(ParseConfig, SingleGainKeepsOtherDefaults) {
  const RunConfig c = parse("k_w = 5\n");
  const Gains d;
  EXPECT_EQ(c.gains.k_w, 5.0);
  EXPECT_EQ(c.gains.k_v, d.k_v);
  EXPECT_EQ(c.gains.k_a, d.k_a);
  EXPECT_EQ(c.gains.gamma_sigma, d.gamma_sigma);
  EXPECT_EQ(c.gains.k_sigma, d.k_sigma);
  EXPECT_EQ(c.gains.gamma_g, d.gamma_g);
  EXPECT_EQ(d.k_v, 10.0);
  EXPECT_EQ(d.gamma_g, 2.0);
}

TEST(ParseConfig, NegativeGainIsValidationError) {
  try {
    parse("k_v = -1\n");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.key(), "k_v");
    EXPECT_NE(e.reason().find("positive"), std::string::npos);
  }
}

TEST(ParseConfig, UnknownKeyIsParseError) {
  try {
    parse("# comment\n\nk_z = 1\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.key(), "k_z");
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(ParseConfig, MalformedInput) {
  EXPECT_THROW(parse("k_w 5\n"), ParseError);
  EXPECT_THROW(parse("k_w = five\n"), ParseError);
  EXPECT_THROW(parse("k_w = 1\nk_w = 2\n"), ParseError);
  EXPECT_THROW(parse("center = 1, 2\n"), ParseError);
  EXPECT_THROW(parse("mode = sideways\n"), ValidationError);
  EXPECT_THROW(parse("landmark_rate = 30\n"), ValidationError);
}

TEST(ParseConfig, InlineCommentsAndModes) {
  const RunConfig c = parse("mode = both   # run both\ntrajectory = circle\nseed = 77\ngravity = 0, 0, -9.8\n");
  EXPECT_EQ(c.mode, ModeSelection::both);
  EXPECT_EQ(c.trajectory.kind, TrajectoryKind::circle);
  EXPECT_EQ(c.noise.seed, 77u);
  EXPECT_EQ(c.gravity, Vec3(0, 0, -9.8));
  EXPECT_EQ(modes_of(c.mode).size(), 2u);
  EXPECT_EQ(parse_mode("adaptive-gravity"), ModeSelection::adaptive);
}

TEST(ParseConfig, MissingReferencedFile) {
  const fs::path dir = test::scratch_dir("cfg_missing");
  try {
    parse_config_text("imu_path = nowhere.csv\n", dir);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.key(), "imu_path");
  }
  EXPECT_THROW(parse_config(dir / "absent.cfg"), ValidationError);
}

TEST(ParseConfig, RelativePathsResolveAgainstFile) {
  const fs::path dir = test::scratch_dir("cfg_rel");
  std::ofstream(dir / "imu.csv") << "t_ns,wx,wy,wz,ax,ay,az\n";
  std::ofstream(dir / "run.cfg") << "imu_path = imu.csv\nout_dir = results\n";
  const RunConfig c = parse_config(dir / "run.cfg");
  ASSERT_TRUE(c.imu_path);
  EXPECT_TRUE(fs::equivalent(*c.imu_path, dir / "imu.csv"));
  EXPECT_EQ(c.out_dir, dir / "results");
}

TEST(RenderConfig, RoundTrip) {
  RunConfig c;
  c.gains.k_w = 2.5;
  c.gains.mu = 0.3;
  c.mode = ModeSelection::adaptive;
  c.trajectory.kind = TrajectoryKind::waypoints;
  c.trajectory.duration = 6.0;
  c.trajectory.waypoints = {{0, Vec3(0, 0, 1)}, {3, Vec3(1, 2, 3)}, {6.5, Vec3(-1, 0.1, 1)}};
  c.noise = {0.05, 0.07, 123, {}};
  c.landmark_noise = 0.01;
  c.init_angle_deg = 33.3;
  c.init_velocity = Vec3(0.1, 0.2, 0.3);
  c.trials = 4;
  c.out_dir = "elsewhere";
  const RunConfig back = parse(render_config(c));
  EXPECT_EQ(render_config(back), render_config(c));
  EXPECT_EQ(back.gains.mu, 0.3);
  EXPECT_EQ(back.trajectory.waypoints.size(), 3u);
  EXPECT_EQ(back.trajectory.waypoints[2].p, Vec3(-1, 0.1, 1));
  EXPECT_EQ(back.noise.seed, 123u);
  EXPECT_EQ(back.init_angle_deg, 33.3);
  EXPECT_EQ(back.trials, 4u);
}

TEST(RunConfig, ScenarioReflectsSettings) {
  const RunConfig c = parse("init_att_angle_deg = 90\ninit_pos_offset = 1, 0, 0\nimu_rate = 400\n");
  const Scenario sc = c.scenario(GravityMode::adaptive);
  EXPECT_EQ(sc.mode, GravityMode::adaptive);
  EXPECT_EQ(sc.imu_rate, 400.0);
  EXPECT_NEAR(sc.init.angle, std::numbers::pi / 2, 1e-15);
  EXPECT_EQ(sc.init.position, Vec3(1, 0, 0));
}

}  // namespace
}  // namespace se23nav
