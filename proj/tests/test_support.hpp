#pragma once

#include "se23nav/lie.hpp"
#include "se23nav/quaternion.hpp"
#include "se23nav/random.hpp"

#include <cmath>
#include <filesystem>
#include <string>

namespace se23nav::test {

inline Rotation random_rotation(NormalRng& rng) {
  Quat q;
  q.w = rng.normal();
  q.v = rng.normal3(1.0);
  return quat_to_rot(q.normalized());
}

inline Mat3 rz(double angle) {
  Mat3 m;
  m << std::cos(angle), -std::sin(angle), 0, std::sin(angle), std::cos(angle), 0, 0, 0, 1;
  return m;
}

/// Naive long-series exponential, no scaling.
template <typename M>
M series_exp(const M& a, int terms) {
  M sum = M::Identity();
  M term = M::Identity();
  for (int k = 1; k < terms; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
  }
  return sum;
}

/// Series with scaling and squaring, for arguments of norm up to a few units.
template <typename M>
M scaled_series_exp(const M& a, int terms) {
  int s = 0;
  double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  while (norm > 0.0625) {
    norm *= 0.5;
    ++s;
  }
  M e = series_exp<M>(a / std::ldexp(1.0, s), terms);
  for (int i = 0; i < s; ++i) {
    e = e * e;
  }
  return e;
}

/// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const std::filesystem::path dir = std::filesystem::path(SE23NAV_TEST_TMP) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace se23nav::test
