#include "relpose/rng.hpp"

#include <cmath>

namespace relpose {

double CounterRng::gaussian() {
  // Box-Muller; always consumes two draws so streams stay aligned.
  double u1 = uniform();
  double u2 = uniform();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Vec3 CounterRng::unit_vector() {
  const double z = 1.0 - 2.0 * uniform();
  const double phi = 2.0 * M_PI * uniform();
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return Vec3(r * std::cos(phi), r * std::sin(phi), z);
}

Mat3 CounterRng::rotation() {
  // Shoemake's method: uniform quaternion from three uniforms.
  const double u1 = uniform();
  const double u2 = uniform();
  const double u3 = uniform();
  const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
  const double w = a * std::sin(2.0 * M_PI * u2);
  const double x = a * std::cos(2.0 * M_PI * u2);
  const double y = b * std::sin(2.0 * M_PI * u3);
  const double z = b * std::cos(2.0 * M_PI * u3);
  return Eigen::Quaterniond(w, x, y, z).toRotationMatrix();
}

std::uint64_t CounterRng::derive(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = base;
  for (std::uint64_t p : path) {
    h ^= p + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    std::uint64_t z = h + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    h = z ^ (z >> 31);
  }
  return h;
}

}  // namespace relpose
