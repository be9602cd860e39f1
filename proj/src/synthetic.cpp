#include "relpose/synthetic.hpp"

#include <cmath>

namespace relpose {

void SceneConfig::validate() const {
  if (n < 6) throw DegenerateInput("scene needs at least 6 correspondences");
  if (noise_px < 0.0) throw DegenerateInput("noise must be nonnegative");
  if (focal_px <= 0.0) throw DegenerateInput("focal length must be positive");
  if (depth_min >= depth_max || depth_min <= 0.0) {
    throw DegenerateInput("depth range must satisfy 0 < min < max");
  }
  if (rotation_bound_rad <= 0.0 || rotation_bound_rad >= M_PI) {
    throw DegenerateInput("rotation bound must lie in (0, pi)");
  }
  if (magnitude_lo < 0.0 || magnitude_hi < magnitude_lo) {
    throw DegenerateInput("translation magnitude range is invalid");
  }
}

SceneConfig SceneConfig::with_magnitude(double magnitude, SceneConfig base) {
  base.magnitude_lo = magnitude;
  base.magnitude_hi = magnitude;
  return base;
}

std::pair<Vec3, Vec3> tangent_basis(const Vec3& f) {
  int smallest = 0;
  for (int k = 1; k < 3; ++k) {
    if (std::abs(f(k)) < std::abs(f(smallest))) smallest = k;
  }
  const Vec3 b1 = f.cross(Vec3::Unit(smallest)).normalized();
  const Vec3 b2 = f.cross(b1);
  return {b1, b2};
}

namespace {

Mat3 euler_zyx(double az, double ay, double ax) {
  return (Eigen::AngleAxisd(az, Vec3::UnitZ()) * Eigen::AngleAxisd(ay, Vec3::UnitY()) *
          Eigen::AngleAxisd(ax, Vec3::UnitX()))
      .toRotationMatrix();
}

Vec3 perturb_in_tangent_plane(const Vec3& f, double noise_rad, CounterRng& rng) {
  const auto [b1, b2] = tangent_basis(f);
  const double d1 = rng.symmetric(noise_rad);
  const double d2 = rng.symmetric(noise_rad);
  return (f + d1 * b1 + d2 * b2).normalized();
}

}  // namespace

SyntheticInstance generate_scene(const SceneConfig& config) {
  config.validate();
  CounterRng rng(config.seed);

  const double az = rng.symmetric(config.rotation_bound_rad);
  const double ay = rng.symmetric(config.rotation_bound_rad);
  const double ax = rng.symmetric(config.rotation_bound_rad);
  const Mat3 rotation = euler_zyx(az, ay, ax);

  const Vec3 direction = rng.unit_vector();
  const double magnitude = config.magnitude_lo == config.magnitude_hi
                               ? config.magnitude_lo
                               : config.magnitude_lo +
                                     (config.magnitude_hi - config.magnitude_lo) *
                                         (1.0 - rng.uniform());  // (lo, hi]
  const Vec3 translation = magnitude * direction;

  SyntheticInstance instance;
  instance.ground_truth =
      RelativePose{RotationMatrix::from_matrix(rotation), UnitVector3(direction)};
  instance.translation_magnitude = magnitude;
  instance.pairs.reserve(config.n);
  instance.clean_pairs.reserve(config.n);
  instance.point_depths.reserve(config.n);

  // Camera 0 sits at the identity, so world points are view-0 points; the
  // pose maps view-1 coordinates into view 0: x0 = R x1 + t.
  for (int i = 0; i < config.n; ++i) {
    const Vec3 point = rng.unit_vector() * rng.uniform(config.depth_min, config.depth_max);
    const Vec3 in_view1 = rotation.transpose() * (point - translation);
    instance.point_depths.emplace_back(point.norm(), in_view1.norm());
    instance.clean_pairs.emplace_back(UnitVector3(point), UnitVector3(in_view1));
  }

  const double noise_rad = config.noise_px / config.focal_px;
  for (const BearingPair& clean : instance.clean_pairs) {
    if (config.noise_px == 0.0) {
      instance.pairs.push_back(clean);
      continue;
    }
    const Vec3 f0 = perturb_in_tangent_plane(clean.f0.vec(), noise_rad, rng);
    const Vec3 f1 = perturb_in_tangent_plane(clean.f1.vec(), noise_rad, rng);
    instance.pairs.emplace_back(UnitVector3(f0), UnitVector3(f1));
  }
  return instance;
}

std::pair<double, double> pose_errors(const RelativePose& ground_truth,
                                      const RelativePose& estimate) {
  const double cos_rot = std::clamp(
      0.5 * ((ground_truth.rotation.mat().transpose() * estimate.rotation.mat()).trace() - 1.0),
      -1.0, 1.0);
  const double cos_trans =
      std::clamp(ground_truth.translation.vec().dot(estimate.translation.vec()), -1.0, 1.0);
  constexpr double kRadToDeg = 180.0 / M_PI;
  return {std::acos(cos_rot) * kRadToDeg, std::acos(cos_trans) * kRadToDeg};
}

}  // namespace relpose
