#include "se23nav/selftest.hpp"

#include "se23nav/errors.hpp"
#include "se23nav/quaternion.hpp"
#include "se23nav/random.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <unordered_map>
#include <utility>

namespace se23nav {

namespace {

Rotation random_rotation(NormalRng& rng) {
  Quat q;
  q.w = rng.normal();
  q.v = rng.normal3(1.0);
  return quat_to_rot(q.normalized());
}

/// Plain power series of exp with scaling and squaring, kept separate from expm5.
Mat5 series_exp(const Mat5& a, int terms) {
  int squarings = 0;
  double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  while (norm > 0.125) {
    norm *= 0.5;
    ++squarings;
  }
  const Mat5 scaled = a / std::ldexp(1.0, squarings);
  Mat5 sum = Mat5::Identity();
  Mat5 term = Mat5::Identity();
  for (int k = 1; k < terms; ++k) {
    term = term * scaled / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) {
    sum = sum * sum;
  }
  return sum;
}

std::string sci(double v) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << v;
  return s.str();
}

SuiteResult algebra_suite(std::size_t n) {
  NormalRng rng(11);
  double vex_err = 0.0;
  double dist_err = 0.0;
  bool dist_in_range = true;
  double exp_err = 0.0;
  double rodrigues_err = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 x = rng.normal3(2.0);
    vex_err = std::max(vex_err, (vex(skew(x)) - x).cwiseAbs().maxCoeff());

    const Rotation r = random_rotation(rng);
    const double d = dist_so3(r);
    dist_in_range = dist_in_range && d >= 0.0 && d <= 1.0;
    dist_err = std::max(dist_err, std::abs(d - (Mat3::Identity() - r.matrix()).squaredNorm() / 8.0));

    const TangentElement u{rng.normal3(1.0), rng.normal3(1.0), rng.normal3(1.0), rng.uniform()};
    const double dt = 0.5 * rng.uniform();
    const Mat5 a = u.matrix() * dt;
    exp_err = std::max(exp_err, (expm5(a) - series_exp(a, 30)).cwiseAbs().maxCoeff());
    rodrigues_err = std::max(
        rodrigues_err,
        (rodrigues_exp(u.omega, dt).matrix() - expm5(a).topLeftCorner<3, 3>()).cwiseAbs().maxCoeff());
  }
  SuiteResult out{"algebra", false, ""};
  out.passed = vex_err == 0.0 && dist_in_range && dist_err <= 1e-12 && exp_err <= 1e-10 && rodrigues_err <= 1e-12;
  out.detail = "vex " + sci(vex_err) + ", dist " + sci(dist_err) + ", expm " + sci(exp_err) + ", rodrigues " +
               sci(rodrigues_err);
  return out;
}

SuiteResult scatter_bound_suite(std::size_t n) {
  NormalRng rng(12);
  std::size_t violations = 0;
  std::size_t rejected = 0;
  double worst_lower = 0.0;  // max of lower bound / value
  double worst_upper = 0.0;  // max of value / upper bound
  for (std::size_t i = 0; i < n;) {
    const int count = 3 + static_cast<int>(rng.uniform() * 6.0);
    std::vector<Landmark> lms;
    for (int j = 0; j < count; ++j) {
      const Vec3 p(10.0 * rng.uniform() - 5.0, 10.0 * rng.uniform() - 5.0, 10.0 * rng.uniform() - 5.0);
      lms.push_back({j, p, 0.1 + 1.9 * rng.uniform()});
    }
    const LandmarkMap map(lms);
    const ConfigReport report = check_configuration(map);
    if (report.violates_assumption) {
      ++rejected;
      continue;
    }
    ++i;
    const Rotation rtilde = random_rotation(rng);
    // Noise-free observation with P = 0 and Rhat = I gives m_rtilde = M R~.
    NormalRng unused(0);
    const LandmarkObservation obs =
        synthesize_observation(NavState{rtilde.transpose(), Vec3::Zero(), Vec3::Zero()}, map, 0.0, unused);
    const MeasurementSummary s = aggregate(map, obs, Rotation(), Vec3::Zero());
    const double dist = 0.25 * (s.m * (Mat3::Identity() - rtilde.matrix())).trace();
    const double y2 = upsilon(s.m * rtilde.matrix()).squaredNorm();
    const double lower = 0.5 * report.lambda_min_mbar * (1.0 + rtilde.matrix().trace()) * dist;
    const double upper = 2.0 * report.lambda_max_mbar * dist;
    if (lower > y2 + 1e-12 || y2 > upper + 1e-12) {
      ++violations;
    }
    if (y2 > 0.0) {
      worst_lower = std::max(worst_lower, lower / y2);
    }
    if (upper > 0.0) {
      worst_upper = std::max(worst_upper, y2 / upper);
    }
  }
  SuiteResult out{"scatter-bounds", violations == 0, ""};
  out.detail = std::to_string(n) + " samples, " + std::to_string(violations) + " violations, tightest ratios " +
               sci(worst_lower) + " / " + sci(worst_upper) + " (" + std::to_string(rejected) + " degenerate maps redrawn)";
  return out;
}

SuiteResult equivalence_suite(std::size_t steps) {
  Scenario sc;
  sc.noise = {0.12, 0.11, 7, {}};
  sc.trajectory.duration = static_cast<double>(steps) / sc.imu_rate;
  const EquivalenceReport r = compare_observer_forms(sc, steps);
  SuiteResult out{"quaternion-equivalence", false, ""};
  out.passed = r.attitude < 1e-8 && r.position < 1e-7 && r.velocity < 1e-7;
  out.detail = std::to_string(r.steps) + " steps, max attitude " + sci(r.attitude) + ", position " +
               sci(r.position) + ", velocity " + sci(r.velocity);
  return out;
}

SuiteResult fixed_point_suite(double duration) {
  Scenario sc;
  sc.trajectory.kind = TrajectoryKind::circle;
  sc.trajectory.duration = duration;
  sc.init = InitError::none();
  const RunResult r = run_closed_loop(sc);
  Metrics worst;
  for (const EstimateRow& row : r.rows) {
    worst.attitude = std::max(worst.attitude, row.metrics->attitude);
    worst.position = std::max(worst.position, row.metrics->position);
    worst.velocity = std::max(worst.velocity, row.metrics->velocity);
    worst.gravity = std::max(worst.gravity, row.metrics->gravity);
  }
  SuiteResult out{"fixed-point", false, ""};
  out.passed = worst.attitude < 1e-9 && worst.position < 1e-9 && worst.velocity < 1e-9 && worst.gravity < 1e-9;
  out.detail = "max errors " + sci(worst.attitude) + ", " + sci(worst.position) + ", " + sci(worst.velocity) +
               ", " + sci(worst.gravity);
  return out;
}

SuiteResult convergence_suite(double duration, bool inject_fault) {
  Scenario sc;
  sc.trajectory.duration = duration;
  sc.gains.debug_flip_w_omega = inject_fault;
  SuiteResult out{"convergence", false, ""};
  try {
    const RunResult r = run_closed_loop(sc);
    const Metrics& f = r.summary->final;
    out.passed = f.attitude < 0.01 && f.attitude < r.summary->initial.attitude;
    out.detail = "attitude " + sci(r.summary->initial.attitude) + " -> " + sci(f.attitude) + " after " +
                 std::to_string(static_cast<int>(duration)) + " s";
  } catch (const NonFiniteState& e) {
    out.detail = std::string("diverged: ") + e.what();
  }
  return out;
}

}  // namespace

EquivalenceReport compare_observer_forms(const Scenario& scenario, std::size_t steps) {
  const SimulatedLogs logs = simulate_logs(scenario);
  std::unordered_map<std::int64_t, const LandmarkObservation*> obs_at;
  for (const LandmarkObservation& o : logs.observations) {
    obs_at.emplace(to_nanoseconds(o.t), &o);
  }
  const NavState truth0 = logs.truth.front().nav();
  NavState x0;
  x0.r = Rotation::about_axis(scenario.init.axis, scenario.init.angle).transpose() * truth0.r;
  x0.p = truth0.p - scenario.init.position;
  x0.v = truth0.v - scenario.init.velocity;
  ObserverState m = scenario.mode == GravityMode::known ? ObserverState::with_known_gravity(x0, scenario.gravity)
                                                        : ObserverState::with_adaptive_gravity(x0);
  QuatObserverState q = QuatObserverState::from(m);

  EquivalenceReport r;
  const std::size_t n = std::min(steps, logs.imu.size() - 1);
  for (std::size_t k = 0; k < n; ++k) {
    const ImuReading imu{logs.imu[k].omega_m, logs.imu[k].a_m};
    const double dt = logs.imu[k + 1].t - logs.imu[k].t;
    const auto it = obs_at.find(to_nanoseconds(logs.imu[k + 1].t));
    if (it != obs_at.end()) {
      m = step(m, imu, logs.map, *it->second, scenario.gains, dt);
      q = step_quaternion(q, imu, logs.map, *it->second, scenario.gains, dt);
    } else {
      m = predict(m, imu, dt);
      q = predict_quaternion(q, imu, dt);
    }
    const NavState xq = q.nav();
    r.attitude = std::max(r.attitude, dist_so3(xq.r * m.xhat.r.transpose()));
    r.position = std::max(r.position, (xq.p - m.xhat.p).norm());
    r.velocity = std::max(r.velocity, (xq.v - m.xhat.v).norm());
    r.steps = k + 1;
  }
  return r;
}

std::vector<SuiteResult> run_selftest_suites(const SelftestOptions& options, std::ostream* log) {
  const std::size_t samples = options.quick ? 1000 : 100000;
  const std::vector<std::pair<std::string, std::function<SuiteResult()>>> suites = {
      {"algebra", [&] { return algebra_suite(samples); }},
      {"scatter-bounds", [&] { return scatter_bound_suite(samples); }},
      {"quaternion-equivalence", [&] { return equivalence_suite(options.quick ? 2000 : 8000); }},
      {"fixed-point", [&] { return fixed_point_suite(options.quick ? 10.0 : 40.0); }},
      {"convergence", [&] { return convergence_suite(options.quick ? 20.0 : 40.0, options.inject_fault); }},
  };
  std::vector<SuiteResult> results;
  for (const auto& [name, suite] : suites) {
    SuiteResult r;
    try {
      r = suite();
    } catch (const std::exception& e) {
      r = {name, false, std::string("exception: ") + e.what()};
    }
    if (log != nullptr && options.verbose) {
      *log << "  " << r.name << ": " << r.detail << '\n';
    }
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace se23nav
