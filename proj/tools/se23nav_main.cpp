#include "se23nav/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Landmark and IMU navigation observer on SE2(3)"};
  app.require_subcommand(1);

  se23nav::CliOptions options;
  std::string config;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::string mode;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "key = value configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out-dir", out_dir, "output directory (overrides out_dir)");
    sub->add_option("--seed", seed, "noise seed (overrides seed)");
    sub->add_option("--mode", mode, "known-gravity, adaptive-gravity or both (overrides mode)")
        ->check(CLI::IsMember({"known-gravity", "adaptive-gravity", "both"}));
  };

  CLI::App* simulate = app.add_subcommand("simulate", "simulate a scenario and run the observer");
  add_common(simulate);
  CLI::App* replay = app.add_subcommand("replay", "run the observer over recorded logs");
  add_common(replay);
  CLI::App* selftest = app.add_subcommand("selftest", "run the verification suites");
  selftest->add_flag("--quick", options.quick, "reduced sample counts");
  selftest->add_flag("--verbose", options.verbose, "print per-suite detail while running");
  selftest->add_flag("--inject-fault", options.inject_fault, "negate w_Omega; the convergence suite must fail");
  selftest->add_option("--out-dir", out_dir, "accepted for symmetry; selftest writes no files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : se23nav::kExitConfig;
  }

  if (!config.empty()) {
    options.config = config;
  }
  if (!out_dir.empty()) {
    options.out_dir = out_dir;
  }
  if (simulate->count("--seed") > 0 || replay->count("--seed") > 0) {
    options.seed = seed;
  }
  if (!mode.empty()) {
    options.mode = mode;
  }

  if (*simulate) {
    return se23nav::run_simulate(options, std::cout, std::cerr);
  }
  if (*replay) {
    return se23nav::run_replay(options, std::cout, std::cerr);
  }
  return se23nav::run_selftest(options, std::cout, std::cerr);
}
