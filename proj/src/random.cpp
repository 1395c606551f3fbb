#include "se23nav/random.hpp"

#include <cmath>
#include <numbers>

namespace se23nav {

double NormalRng::uniform() {
  // 53 random bits, offset by half an ulp so the result is never 0.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double NormalRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

Vec3 NormalRng::normal3(double std_dev) {
  if (std_dev == 0.0) {
    return Vec3::Zero();
  }
  const double x = normal();
  const double y = normal();
  const double z = normal();
  return std_dev * Vec3(x, y, z);
}

}  // namespace se23nav
