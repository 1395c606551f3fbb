#include "se23nav/cli.hpp"

#include "se23nav/config.hpp"
#include "se23nav/dataset_io.hpp"
#include "se23nav/errors.hpp"
#include "se23nav/selftest.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace se23nav {

namespace fs = std::filesystem;

namespace {

constexpr const char* kLandmarkRequirement =
    "landmark configuration rejected: at least three non-collinear landmarks are required";

/// Config file plus overrides. Relative --out-dir is taken from the working directory.
RunConfig resolve_config(const CliOptions& o) {
  RunConfig c = o.config ? parse_config(*o.config) : RunConfig{};
  if (o.out_dir) {
    c.out_dir = *o.out_dir;
  }
  if (o.seed) {
    c.noise.seed = *o.seed;
  }
  if (o.mode) {
    c.mode = parse_mode(*o.mode);
  }
  c.validate();
  return c;
}

std::string fixed(double v, int precision) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

void print_summary(std::ostream& out, const RunResult& r) {
  out << "mode: " << to_string(r.mode) << '\n';
  if (!r.summary) {
    const ObserverState& s = r.final_state;
    out << "  no ground truth; final estimate P = [" << fixed(s.xhat.p.x(), 6) << ", " << fixed(s.xhat.p.y(), 6)
        << ", " << fixed(s.xhat.p.z(), 6) << "]\n";
    return;
  }
  const RunSummary& sm = *r.summary;
  const char* names[4] = {"attitude", "position", "velocity", "gravity"};
  const double initial[4] = {sm.initial.attitude, sm.initial.position, sm.initial.velocity, sm.initial.gravity};
  const double final[4] = {sm.final.attitude, sm.final.position, sm.final.velocity, sm.final.gravity};
  const double ms[4] = {sm.steady_state_ms.attitude, sm.steady_state_ms.position, sm.steady_state_ms.velocity,
                        sm.steady_state_ms.gravity};
  out << "  " << std::left << std::setw(10) << "metric" << std::right << std::setw(14) << "initial"
      << std::setw(14) << "final" << std::setw(16) << "steady ms" << std::setw(14) << "settled [s]" << '\n';
  for (int i = 0; i < 4; ++i) {
    const auto& settled = sm.convergence_time[i];
    out << "  " << std::left << std::setw(10) << names[i] << std::right << std::setw(14) << fixed(initial[i], 6)
        << std::setw(14) << fixed(final[i], 6) << std::setw(16) << fixed(ms[i], 6) << std::setw(14)
        << (settled ? fixed(*settled, 6) : std::string("-")) << '\n';
  }
}

void print_warnings(std::ostream& err, const RunResult& r) {
  for (const std::string& w : r.warnings) {
    err << "warning: " << w << '\n';
  }
}

fs::path metrics_path(const fs::path& dir, GravityMode m) {
  return dir / (std::string("metrics_") + to_string(m) + ".csv");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create " + dir.string() + ": " + ec.message());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << text;
  f.close();
  if (!f) {
    throw IoError("write failed: " + path.string());
  }
}

/// Maps library errors to exit codes. Config problems are handled before this.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const InsufficientLandmarks& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const UnknownLandmarkId& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const EmptyStream& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

std::optional<RunConfig> load_config(const CliOptions& o, std::ostream& err) {
  try {
    return resolve_config(o);
  } catch (const ParseError& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const ValidationError& e) {
    err << "config error: " << e.what() << '\n';
  }
  return std::nullopt;
}

void require_configuration(const LandmarkMap& map) {
  const ConfigReport report = check_configuration(map);
  if (report.violates_assumption) {
    throw InsufficientLandmarks(std::string(kLandmarkRequirement) + " (" + report.reason + ")");
  }
}

}  // namespace

int run_simulate(const CliOptions& options, std::ostream& out, std::ostream& err) {
  const std::optional<RunConfig> loaded = load_config(options, err);
  if (!loaded) {
    return kExitConfig;
  }
  const RunConfig& config = *loaded;
  return guarded(err, [&] {
    const LandmarkMap map = config.landmarks ? load_map_csv(*config.landmarks) : default_landmark_map();
    require_configuration(map);

    Scenario scenario = config.scenario(GravityMode::known);
    scenario.map = map;
    const SimulatedLogs logs = simulate_logs(scenario);

    ensure_dir(config.out_dir);
    write_imu_csv(config.out_dir / "imu.csv", logs.imu);
    write_observations_csv(config.out_dir / "observations.csv", logs.observations);
    write_truth_csv(config.out_dir / "ground_truth.csv", logs.truth);
    write_map_csv(config.out_dir / "landmarks.csv", logs.map);

    const AlignedStream stream = align(logs.imu, logs.observations, logs.truth);
    for (GravityMode mode : modes_of(config.mode)) {
      RunSetup setup{config.gains, mode, config.gravity, config.init_error()};
      const RunResult result = run_stream(stream, logs.map, setup);
      print_warnings(err, result);
      write_metrics(result, metrics_path(config.out_dir, mode));
      print_summary(out, result);

      if (config.trials > 1) {
        std::vector<std::uint64_t> seeds;
        for (std::size_t i = 0; i < config.trials; ++i) {
          seeds.push_back(config.noise.seed + i);
        }
        Scenario trial = config.scenario(mode);
        trial.map = map;
        const std::vector<MonteCarloTrial> trials = run_monte_carlo(trial, seeds);
        std::ostringstream csv;
        csv << "seed,att_err,pos_err,vel_err,grav_err\n";
        Metrics mean_sq;
        for (const MonteCarloTrial& t : trials) {
          const Metrics& f = t.summary.final;
          csv << t.seed << ',' << format_double(f.attitude) << ',' << format_double(f.position) << ','
              << format_double(f.velocity) << ',' << format_double(f.gravity) << '\n';
          mean_sq.attitude += f.attitude * f.attitude / static_cast<double>(trials.size());
          mean_sq.position += f.position * f.position / static_cast<double>(trials.size());
          mean_sq.velocity += f.velocity * f.velocity / static_cast<double>(trials.size());
          mean_sq.gravity += f.gravity * f.gravity / static_cast<double>(trials.size());
        }
        write_text(config.out_dir / (std::string("monte_carlo_") + to_string(mode) + ".csv"), csv.str());
        out << "  monte carlo (" << trials.size() << " seeds) mean squared final error: attitude "
            << fixed(mean_sq.attitude, 6) << ", position " << fixed(mean_sq.position, 6) << ", velocity "
            << fixed(mean_sq.velocity, 6) << ", gravity " << fixed(mean_sq.gravity, 6) << '\n';
      }
    }

    // Paths are relative to the output directory, where replay.cfg lives.
    RunConfig replay = config;
    replay.trials = 1;
    replay.landmarks = "landmarks.csv";
    replay.imu_path = "imu.csv";
    replay.obs_path = "observations.csv";
    replay.truth_path = "ground_truth.csv";
    replay.out_dir = "replay";
    write_text(config.out_dir / "replay.cfg", "# written by se23nav simulate\n" + render_config(replay));
    return static_cast<int>(kExitOk);
  });
}

int run_replay(const CliOptions& options, std::ostream& out, std::ostream& err) {
  const std::optional<RunConfig> loaded = load_config(options, err);
  if (!loaded) {
    return kExitConfig;
  }
  const RunConfig& config = *loaded;
  if (!config.imu_path || !config.obs_path || !config.landmarks) {
    err << "config error: replay needs imu_path, obs_path and landmarks\n";
    return kExitConfig;
  }
  return guarded(err, [&] {
    const std::vector<ImuSample> imu = load_imu_csv(*config.imu_path);
    const LandmarkData landmarks = load_landmarks(*config.landmarks, *config.obs_path);
    if (landmarks.report.violates_assumption) {
      throw InsufficientLandmarks(std::string(kLandmarkRequirement) + " (" + landmarks.report.reason + ")");
    }
    std::vector<GroundTruthSample> truth;
    if (config.truth_path) {
      truth = load_truth_csv(*config.truth_path);
    }
    const AlignedStream stream = align(imu, landmarks.observations, truth);

    ensure_dir(config.out_dir);
    for (GravityMode mode : modes_of(config.mode)) {
      RunSetup setup{config.gains, mode, config.gravity, config.init_error()};
      const RunResult result = run_stream(stream, landmarks.map, setup);
      print_warnings(err, result);
      write_metrics(result, metrics_path(config.out_dir, mode));
      print_summary(out, result);
    }
    return static_cast<int>(kExitOk);
  });
}

int run_selftest(const CliOptions& options, std::ostream& out, std::ostream&) {
  SelftestOptions so;
  so.quick = options.quick;
  so.verbose = options.verbose;
  so.inject_fault = options.inject_fault;
  const std::vector<SuiteResult> results = run_selftest_suites(so, &out);
  bool all = true;
  out << std::left << std::setw(26) << "suite" << "result\n";
  for (const SuiteResult& r : results) {
    out << std::left << std::setw(26) << r.name << (r.passed ? "PASS" : "FAIL") << "  " << r.detail << '\n';
    all = all && r.passed;
  }
  return all ? kExitOk : kExitSelftestFailed;
}

}  // namespace se23nav
