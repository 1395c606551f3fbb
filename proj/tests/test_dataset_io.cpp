#include "se23nav/dataset_io.hpp"
#include "se23nav/errors.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <limits>

namespace se23nav {
namespace {

namespace fs = std::filesystem;

fs::path write(const fs::path& dir, const std::string& name, const std::string& text) {
  const fs::path p = dir / name;
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.0), "0");
  EXPECT_EQ(format_double(9.81), "9.81");
  EXPECT_EQ(format_double(-0.5), "-0.5");
  NormalRng rng(51);
  for (int i = 0; i < 10000; ++i) {
    const double v = rng.normal() * std::pow(10.0, static_cast<int>(rng.uniform() * 40) - 20);
    ASSERT_EQ(std::stod(format_double(v)), v);
  }
}

TEST(LoadImu, SingleRow) {
  const fs::path dir = test::scratch_dir("io_imu");
  const auto imu = load_imu_csv(write(dir, "imu.csv", "#t_ns,wx,wy,wz,ax,ay,az\n0,0.0,0.0,0.0,0.0,0.0,9.81\n"));
  ASSERT_EQ(imu.size(), 1u);
  EXPECT_EQ(imu[0].t, 0.0);
  EXPECT_EQ(imu[0].a_m, Vec3(0, 0, 9.81));
}

TEST(LoadImu, EurocHeaderAccepted) {
  const fs::path dir = test::scratch_dir("io_imu_euroc");
  const std::string text =
      "#timestamp [ns],w_RS_S_x [rad s^-1],w_RS_S_y [rad s^-1],w_RS_S_z [rad s^-1],"
      "a_RS_S_x [m s^-2],a_RS_S_y [m s^-2],a_RS_S_z [m s^-2]\n"
      "1403715273262142976,-0.0991,0.1473,0.0258,8.1476,-0.3760,-2.4272\n"
      "1403715273267142912,-0.0984,0.1466,0.0216,8.0336,-0.3923,-2.3782\n";
  const auto imu = load_imu_csv(write(dir, "data.csv", text));
  ASSERT_EQ(imu.size(), 2u);
  // Epoch-scale stamps keep about 0.2 us of resolution as double seconds.
  EXPECT_NEAR(imu[1].t - imu[0].t, 0.005, 1e-6);
  EXPECT_EQ(imu[0].omega_m, Vec3(-0.0991, 0.1473, 0.0258));
}

TEST(LoadImu, Errors) {
  const fs::path dir = test::scratch_dir("io_imu_err");
  try {
    load_imu_csv(write(dir, "empty.csv", ""));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("missing header"), std::string::npos);
  }
  try {
    load_imu_csv(write(dir, "order.csv", "t_ns,wx,wy,wz,ax,ay,az\n10,0,0,0,0,0,0\n5,0,0,0,0,0,0\n"));
    FAIL();
  } catch (const NonMonotonicTime& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  try {
    load_imu_csv(write(dir, "short.csv", "t_ns,wx,wy,wz,ax,ay,az\n0,0,0,0,0,0,0\n5,0,0,0,0\n"));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  try {
    load_imu_csv(write(dir, "nan.csv", "t_ns,wx,wy,wz,ax,ay,az\n0,0,0,x,0,0,0\n"));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(load_imu_csv(write(dir, "hdr.csv", "a,b,c\n")), ParseError);
  EXPECT_THROW(load_imu_csv(dir / "absent.csv"), IoError);
}

TEST(LoadTruth, RejectsNonUnitQuaternion) {
  const fs::path dir = test::scratch_dir("io_truth");
  EXPECT_THROW(load_truth_csv(write(dir, "t.csv", "t_ns,qw,qx,qy,qz,px,py,pz,vx,vy,vz\n0,2,0,0,0,0,0,0,0,0,0\n")),
               ParseError);
  const auto t = load_truth_csv(write(dir, "ok.csv", "t_ns,qw,qx,qy,qz,px,py,pz,vx,vy,vz\n0,1,0,0,0,1,2,3,4,5,6\n"));
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].p, Vec3(1, 2, 3));
  EXPECT_EQ(t[0].v, Vec3(4, 5, 6));
}

const char* kMap3 = "id,px,py,pz,s\n1,1,0,0,1\n2,0,1,0,1\n3,0,0,1,1\n";

TEST(LoadLandmarks, Examples) {
  const fs::path dir = test::scratch_dir("io_lm");
  const std::string obs = "t_ns,id,yx,yy,yz\n0,1,1,0,0\n0,2,0,1,0\n0,3,0,0,1\n5000000,1,1,0,0\n5000000,2,0,1,0\n5000000,3,0,0,1\n";
  const LandmarkData ok = load_landmarks(write(dir, "map.csv", kMap3), write(dir, "obs.csv", obs));
  EXPECT_EQ(ok.map.size(), 3u);
  ASSERT_EQ(ok.observations.size(), 2u);
  EXPECT_EQ(ok.observations[1].t, 0.005);
  EXPECT_FALSE(ok.report.violates_assumption);

  const LandmarkData collinear = load_landmarks(
      write(dir, "line.csv", "id,px,py,pz,s\n1,1,0,0,1\n2,2,0,0,1\n3,3,0,0,1\n"), write(dir, "obs.csv", obs));
  EXPECT_TRUE(collinear.report.violates_assumption);

  try {
    load_landmarks(write(dir, "map.csv", kMap3), write(dir, "bad.csv", "t_ns,id,yx,yy,yz\n0,1,0,0,0\n0,2,0,0,0\n0,99,0,0,0\n"));
    FAIL();
  } catch (const UnknownLandmarkId& e) {
    EXPECT_EQ(e.id(), 99);
  }
  EXPECT_THROW(load_landmarks(write(dir, "map.csv", kMap3), write(dir, "two.csv", "t_ns,id,yx,yy,yz\n0,1,0,0,0\n0,2,0,0,0\n")),
               InsufficientLandmarks);
  EXPECT_THROW(load_map_csv(write(dir, "dup.csv", "id,px,py,pz,s\n1,0,0,0,1\n1,1,1,1,1\n")), ParseError);
  EXPECT_THROW(load_map_csv(write(dir, "neg.csv", "id,px,py,pz,s\n1,0,0,0,-1\n")), ParseError);
}

ImuSample imu_at(double t) { return {t, Vec3::Zero(), Vec3::Zero()}; }

TEST(Align, TiesPutImuFirst) {
  const AlignedStream s = align({imu_at(0.0), imu_at(0.005)}, {LandmarkObservation{0.0, {}}});
  ASSERT_EQ(s.events.size(), 3u);
  EXPECT_TRUE(std::holds_alternative<ImuSample>(s.events[0]));
  EXPECT_TRUE(std::holds_alternative<LandmarkObservation>(s.events[1]));
  EXPECT_EQ(event_time(s.events[2]), 0.005);
}

TEST(Align, InterleavesAndKeepsEverything) {
  GroundTruthSample g;
  g.t = 0.003;
  const AlignedStream s =
      align({imu_at(0.0), imu_at(0.004), imu_at(0.008)}, {LandmarkObservation{0.002, {}}, LandmarkObservation{0.006, {}}}, {g});
  ASSERT_EQ(s.events.size(), 6u);
  for (std::size_t i = 1; i < s.events.size(); ++i) {
    EXPECT_LT(event_time(s.events[i - 1]), event_time(s.events[i]));
  }
}

TEST(Align, EmptyStreams) {
  EXPECT_THROW(align({imu_at(0.0)}, {}), EmptyStream);
  EXPECT_NO_THROW(align({imu_at(0.0)}, {}, {}, false));
  EXPECT_THROW(align({}, {LandmarkObservation{0.0, {}}}), EmptyStream);
}

TEST(RoundTrip, LogsAreLossless) {
  const fs::path dir = test::scratch_dir("io_roundtrip");
  Scenario sc;
  sc.trajectory.duration = 2.0;
  sc.noise = {0.12, 0.11, 4, {}};
  sc.landmark_noise = 0.01;
  const SimulatedLogs logs = simulate_logs(sc);
  write_imu_csv(dir / "imu.csv", logs.imu);
  write_truth_csv(dir / "truth.csv", logs.truth);
  write_map_csv(dir / "map.csv", logs.map);
  write_observations_csv(dir / "obs.csv", logs.observations);

  const auto imu = load_imu_csv(dir / "imu.csv");
  ASSERT_EQ(imu.size(), logs.imu.size());
  for (std::size_t i = 0; i < imu.size(); ++i) {
    ASSERT_EQ(imu[i].t, logs.imu[i].t);
    ASSERT_EQ(imu[i].omega_m, logs.imu[i].omega_m);
    ASSERT_EQ(imu[i].a_m, logs.imu[i].a_m);
  }
  const auto truth = load_truth_csv(dir / "truth.csv");
  ASSERT_EQ(truth.size(), logs.truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ASSERT_EQ(truth[i].q.w, logs.truth[i].q.w);
    ASSERT_EQ(truth[i].q.v, logs.truth[i].q.v);
    ASSERT_EQ(truth[i].p, logs.truth[i].p);
    ASSERT_EQ(truth[i].v, logs.truth[i].v);
  }
  const LandmarkData lm = load_landmarks(dir / "map.csv", dir / "obs.csv");
  ASSERT_EQ(lm.map.size(), logs.map.size());
  for (std::size_t i = 0; i < lm.map.size(); ++i) {
    EXPECT_EQ(lm.map.entries()[i].p, logs.map.entries()[i].p);
    EXPECT_EQ(lm.map.entries()[i].s, logs.map.entries()[i].s);
  }
  ASSERT_EQ(lm.observations.size(), logs.observations.size());
  for (std::size_t i = 0; i < lm.observations.size(); ++i) {
    ASSERT_EQ(lm.observations[i].t, logs.observations[i].t);
    for (std::size_t j = 0; j < lm.observations[i].readings.size(); ++j) {
      ASSERT_EQ(lm.observations[i].readings[j].y, logs.observations[i].readings[j].y);
    }
  }

  // Second pass must produce identical bytes.
  write_imu_csv(dir / "imu2.csv", imu);
  EXPECT_EQ(read_file(dir / "imu.csv"), read_file(dir / "imu2.csv"));
}

TEST(WriteMetrics, EmptyAndSingleRow) {
  const fs::path dir = test::scratch_dir("io_metrics");
  RunResult empty;
  write_metrics(empty, dir / "empty.csv");
  EXPECT_EQ(read_file(dir / "empty.csv"),
            "t,att_err,pos_err,vel_err,grav_err,qw,qx,qy,qz,px,py,pz,vx,vy,vz,gx,gy,gz,sx,sy,sz\n");

  RunResult one;
  EstimateRow row;
  row.t = 0.25;
  row.metrics = Metrics{0.5, 1.0, 2.0, 0.0};
  row.p = Vec3(1, 2, 3);
  one.rows.push_back(row);
  write_metrics(one, dir / "one.csv");
  EXPECT_EQ(read_file(dir / "one.csv"),
            "t,att_err,pos_err,vel_err,grav_err,qw,qx,qy,qz,px,py,pz,vx,vy,vz,gx,gy,gz,sx,sy,sz\n"
            "0.25,0.5,1,2,0,1,0,0,0,1,2,3,0,0,0,0,0,0,0,0,0\n");

  one.rows[0].metrics.reset();
  write_metrics(one, dir / "estimate.csv");
  const MetricsTable t = load_metrics_csv(dir / "estimate.csv");
  EXPECT_EQ(t.columns.size(), 17u);
  EXPECT_EQ(t.columns[1], "qw");
}

TEST(WriteMetrics, RoundTripFullPrecision) {
  const fs::path dir = test::scratch_dir("io_metrics_rt");
  Scenario sc;
  sc.trajectory.duration = 3.0;
  sc.noise = {0.12, 0.11, 8, {}};
  const RunResult r = run_closed_loop(sc);
  write_metrics(r, dir / "m.csv");
  const MetricsTable t = load_metrics_csv(dir / "m.csv");
  ASSERT_EQ(t.rows.size(), r.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    ASSERT_EQ(t.rows[i][0], r.rows[i].t);
    ASSERT_EQ(t.rows[i][1], r.rows[i].metrics->attitude);
    ASSERT_EQ(t.rows[i][2], r.rows[i].metrics->position);
    ASSERT_EQ(t.rows[i][11], r.rows[i].p.z());
    ASSERT_EQ(t.rows[i][20], r.rows[i].sigma_hat.z());
  }
}

TEST(Time, NanosecondConversion) {
  EXPECT_EQ(to_nanoseconds(0.005), 5000000);
  EXPECT_EQ(to_seconds(5000000), 0.005);
  for (std::int64_t ns : {0LL, 1LL, 123456789LL, 86400000000005LL}) {
    EXPECT_EQ(to_nanoseconds(to_seconds(ns)), ns);
  }
}

}  // namespace
}  // namespace se23nav
