#include "se23nav/simulator.hpp"

#include "se23nav/errors.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <thread>
#include <unordered_map>

namespace se23nav {

std::vector<ImuSample> synthesize_imu(const std::vector<TruthSample>& truth, const NoiseSpec& noise) {
  if (!(noise.std_omega >= 0.0) || !(noise.std_accel >= 0.0)) {
    throw ValidationError("noise", "standard deviations must be non-negative");
  }
  NormalRng rng(noise.seed);
  std::vector<ImuSample> out;
  out.reserve(truth.size());
  for (const TruthSample& s : truth) {
    const double scale = noise.profile ? noise.profile(s.t) : 1.0;
    ImuSample imu;
    imu.t = s.t;
    imu.omega_m = s.omega + rng.normal3(scale * noise.std_omega);
    imu.a_m = s.a + rng.normal3(scale * noise.std_accel);
    out.push_back(imu);
  }
  return out;
}

InitError InitError::reference() {
  InitError e;
  e.axis = Vec3(1.0, 1.0, 1.0);
  e.angle = 170.0 * std::numbers::pi / 180.0;
  e.position = Vec3(3.0, -2.0, 1.0);
  e.velocity = Vec3::Zero();
  return e;
}

LandmarkMap default_landmark_map() {
  // Confidence 0.05 keeps the weighted scatter M at a few m^2, which keeps
  // exp(||M R~||_I) in the adaptation gain moderate for large attitude errors.
  constexpr double s = 0.05;
  return LandmarkMap({
      {1, Vec3(4.0, 1.0, 0.5), s},
      {2, Vec3(-3.5, 3.0, 2.5), s},
      {3, Vec3(1.5, -4.0, 3.5), s},
      {4, Vec3(-2.0, -2.5, 0.2), s},
      {5, Vec3(0.5, 4.5, 1.0), s},
      {6, Vec3(3.0, -1.5, 4.0), s},
  });
}

void Scenario::validate() const {
  trajectory.validate();
  gains.validate();
  if (!(imu_rate > 0.0)) {
    throw ValidationError("imu_rate", "must be positive");
  }
  if (!(landmark_rate > 0.0) || landmark_rate > imu_rate) {
    throw ValidationError("landmark_rate", "must be positive and not exceed imu_rate");
  }
  const double ratio = imu_rate / landmark_rate;
  if (std::abs(ratio - std::round(ratio)) > 1e-9) {
    throw ValidationError("landmark_rate", "imu_rate must be an integer multiple of landmark_rate");
  }
  if (!(landmark_noise >= 0.0)) {
    throw ValidationError("landmark_noise", "must be non-negative");
  }
  if (!gravity.allFinite()) {
    throw ValidationError("gravity", "must be finite");
  }
}

SimulatedLogs simulate_logs(const Scenario& scenario) {
  scenario.validate();
  const std::vector<TruthSample> truth = generate_truth(scenario.trajectory, scenario.imu_rate, scenario.gravity);

  SimulatedLogs logs;
  logs.map = scenario.map;
  logs.imu = synthesize_imu(truth, scenario.noise);

  const auto every = static_cast<std::size_t>(std::llround(scenario.imu_rate / scenario.landmark_rate));
  NormalRng landmark_rng(scenario.noise.seed ^ 0x9E3779B97F4A7C15ULL);
  logs.truth.reserve(truth.size());
  for (std::size_t k = 0; k < truth.size(); ++k) {
    const TruthSample& s = truth[k];
    // Logged attitude goes through the quaternion, as a replayed file would.
    GroundTruthSample g;
    g.t = s.t;
    g.q = rot_to_quat(s.x.r);
    g.p = s.x.p;
    g.v = s.x.v;
    logs.truth.push_back(g);
    if (k % every == 0) {
      logs.observations.push_back(
          synthesize_observation(s.x, scenario.map, scenario.landmark_noise, landmark_rng, s.t));
    }
  }
  return logs;
}

namespace {

NavState perturb(const NavState& truth, const InitError& e) {
  NavState x;
  const Rotation rtilde = Rotation::about_axis(e.axis, e.angle);
  x.r = rtilde.transpose() * truth.r;
  x.p = truth.p - e.position;
  x.v = truth.v - e.velocity;
  return x;
}

EstimateRow make_row(double t, const ObserverState& s, const GroundTruthSample* truth, const Vec3& gravity) {
  EstimateRow row;
  row.t = t;
  row.q = rot_to_quat(s.xhat.r);
  row.p = s.xhat.p;
  row.v = s.xhat.v;
  row.g_hat = s.g_hat;
  row.sigma_hat = s.sigma_hat;
  if (truth != nullptr) {
    row.metrics = error_metrics(truth->nav(), s, gravity);
  }
  return row;
}

double metric(const Metrics& m, int i) {
  switch (i) {
    case 0:
      return m.attitude;
    case 1:
      return m.position;
    case 2:
      return m.velocity;
    default:
      return m.gravity;
  }
}

}  // namespace

RunSummary summarize(const std::vector<EstimateRow>& rows, const ConvergenceThresholds& thresholds) {
  std::vector<const EstimateRow*> with_metrics;
  for (const EstimateRow& r : rows) {
    if (r.metrics) {
      with_metrics.push_back(&r);
    }
  }
  RunSummary out;
  if (with_metrics.empty()) {
    return out;
  }
  out.initial = *with_metrics.front()->metrics;
  out.final = *with_metrics.back()->metrics;

  const std::size_t n = with_metrics.size();
  const std::size_t tail_begin = n - std::max<std::size_t>(1, n / 5);
  Metrics acc;
  for (std::size_t i = tail_begin; i < n; ++i) {
    const Metrics& m = *with_metrics[i]->metrics;
    acc.attitude += m.attitude * m.attitude;
    acc.position += m.position * m.position;
    acc.velocity += m.velocity * m.velocity;
    acc.gravity += m.gravity * m.gravity;
  }
  const double count = static_cast<double>(n - tail_begin);
  out.steady_state_ms = {acc.attitude / count, acc.position / count, acc.velocity / count,
                         acc.gravity / count};

  const double limits[4] = {thresholds.attitude, thresholds.position, thresholds.velocity,
                            thresholds.gravity};
  for (int i = 0; i < 4; ++i) {
    // Walk back from the end to the last violation.
    std::optional<double> settled;
    for (std::size_t j = n; j-- > 0;) {
      if (metric(*with_metrics[j]->metrics, i) >= limits[i]) {
        break;
      }
      settled = with_metrics[j]->t;
    }
    out.convergence_time[i] = settled;
  }
  return out;
}

RunResult run_stream(const AlignedStream& stream, const LandmarkMap& map, const RunSetup& setup,
                     const ConvergenceThresholds& thresholds) {
  setup.gains.validate();
  const ConfigReport report = check_configuration(map);
  if (report.violates_assumption) {
    throw InsufficientLandmarks("landmark configuration violates the observability assumption "
                                "(at least three non-collinear landmarks required): " +
                                report.reason);
  }

  std::unordered_map<std::int64_t, const GroundTruthSample*> truth_at;
  const ImuSample* first_imu = nullptr;
  for (const StreamEvent& e : stream.events) {
    if (const auto* g = std::get_if<GroundTruthSample>(&e)) {
      truth_at.emplace(to_nanoseconds(g->t), g);
    } else if (const auto* imu = std::get_if<ImuSample>(&e); imu != nullptr && first_imu == nullptr) {
      first_imu = imu;
    }
  }
  if (first_imu == nullptr) {
    throw EmptyStream("no IMU samples");
  }
  auto truth_for = [&](double t) -> const GroundTruthSample* {
    const auto it = truth_at.find(to_nanoseconds(t));
    return it == truth_at.end() ? nullptr : it->second;
  };

  RunResult result;
  result.mode = setup.mode;

  NavState x0 = NavState::identity();
  if (const GroundTruthSample* g0 = truth_for(first_imu->t)) {
    const NavState truth0 = g0->nav();
    x0 = perturb(truth0, setup.init);
    const Rotation rtilde0 = truth0.r * x0.r.transpose();
    if (in_unstable_set(rtilde0)) {
      result.warnings.push_back(
          "initial attitude error lies in the unstable set (Tr{R~(0)} = -1); convergence is not guaranteed");
    }
  }
  ObserverState state = setup.mode == GravityMode::known
                            ? ObserverState::with_known_gravity(x0, setup.gravity)
                            : ObserverState::with_adaptive_gravity(x0);

  result.rows.push_back(make_row(first_imu->t, state, truth_for(first_imu->t), setup.gravity));

  const ImuSample* last_imu = nullptr;
  const LandmarkObservation* pending = nullptr;
  const auto& events = stream.events;
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (const auto* obs = std::get_if<LandmarkObservation>(&events[i])) {
      if (last_imu != nullptr && obs->t > last_imu->t) {
        pending = obs;
      }
      continue;
    }
    const auto* imu = std::get_if<ImuSample>(&events[i]);
    if (imu == nullptr) {
      continue;
    }
    if (last_imu == nullptr) {
      last_imu = imu;
      continue;
    }
    // Observations stamped exactly at this IMU time sort right after it and
    // belong to the interval that ends here.
    for (std::size_t j = i + 1; j < events.size() && event_time(events[j]) == imu->t; ++j) {
      if (const auto* obs = std::get_if<LandmarkObservation>(&events[j])) {
        pending = obs;
      }
    }
    const double dt = imu->t - last_imu->t;
    const ImuReading reading{last_imu->omega_m, last_imu->a_m};
    if (pending != nullptr) {
      state = step(state, reading, map, *pending, setup.gains, dt);
    } else {
      state = predict(state, reading, dt);
    }
    pending = nullptr;
    // Skip the observations consumed above.
    while (i + 1 < events.size() && event_time(events[i + 1]) == imu->t &&
           std::holds_alternative<LandmarkObservation>(events[i + 1])) {
      ++i;
    }
    last_imu = imu;
    result.rows.push_back(make_row(imu->t, state, truth_for(imu->t), setup.gravity));
  }

  result.final_state = state;
  if (!truth_at.empty()) {
    result.summary = summarize(result.rows, thresholds);
  }
  return result;
}

RunResult run_closed_loop(const Scenario& scenario, const ConvergenceThresholds& thresholds) {
  const SimulatedLogs logs = simulate_logs(scenario);
  const AlignedStream stream = align(logs.imu, logs.observations, logs.truth);
  RunSetup setup;
  setup.gains = scenario.gains;
  setup.mode = scenario.mode;
  setup.gravity = scenario.gravity;
  setup.init = scenario.init;
  return run_stream(stream, logs.map, setup, thresholds);
}

std::vector<MonteCarloTrial> run_monte_carlo(const Scenario& scenario, const std::vector<std::uint64_t>& seeds,
                                             const ConvergenceThresholds& thresholds) {
  std::vector<std::uint64_t> sorted = seeds;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t workers = std::max(1U, std::thread::hardware_concurrency());

  std::vector<MonteCarloTrial> out(sorted.size());
  for (std::size_t begin = 0; begin < sorted.size(); begin += workers) {
    const std::size_t end = std::min(sorted.size(), begin + workers);
    std::vector<std::future<RunSummary>> futures;
    for (std::size_t i = begin; i < end; ++i) {
      Scenario trial = scenario;
      trial.noise.seed = sorted[i];
      futures.push_back(std::async(std::launch::async, [trial, thresholds] {
        return *run_closed_loop(trial, thresholds).summary;
      }));
    }
    for (std::size_t i = begin; i < end; ++i) {
      out[i] = {sorted[i], futures[i - begin].get()};
    }
  }
  return out;
}

}  // namespace se23nav
