#pragma once

#include "se23nav/lie.hpp"

#include <cstdint>
#include <random>

namespace se23nav {

/// Seedable Gaussian source with a fixed algorithm (mt19937_64 + Box-Muller),
/// so draws are identical across standard libraries for the same seed.
/// std::normal_distribution is implementation-defined and is not used.
class NormalRng {
 public:
  explicit NormalRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in (0, 1).
  double uniform();
  /// Standard normal.
  double normal();
  /// Per-axis N(0, std^2).
  Vec3 normal3(double std_dev);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace se23nav
