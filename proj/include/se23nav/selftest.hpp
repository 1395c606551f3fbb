#pragma once

#include "se23nav/simulator.hpp"

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

namespace se23nav {

struct SelftestOptions {
  /// 10^3 random samples per property instead of 10^5, shorter closed-loop runs.
  bool quick = false;
  bool verbose = false;
  /// Negates w_Omega in the convergence suite; that suite must then fail.
  bool inject_fault = false;
};

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Runs every suite in a fixed order with fixed seeds.
std::vector<SuiteResult> run_selftest_suites(const SelftestOptions& options, std::ostream* log = nullptr);

/// Largest deviation between the matrix and quaternion observers driven by
/// the same logs for `steps` IMU intervals.
struct EquivalenceReport {
  double attitude = 0.0;  // max ||R_Q Rhat^T||_I
  double position = 0.0;  // max ||P_Q - Phat||
  double velocity = 0.0;  // max ||V_Q - Vhat||
  std::size_t steps = 0;
};

EquivalenceReport compare_observer_forms(const Scenario& scenario, std::size_t steps);

}  // namespace se23nav
