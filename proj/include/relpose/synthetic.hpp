#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "relpose/geometry.hpp"
#include "relpose/rng.hpp"

namespace relpose {

/// Synthetic two-view protocol: camera 0 at the identity, camera 1 with
/// bounded random Euler angles and a random translation direction, points in
/// a spherical shell around the origin, pixel noise in each bearing's
/// tangent plane.
struct SceneConfig {
  int n = 50;
  double noise_px = 0.0;
  double focal_px = 800.0;           // converts pixel noise to radians
  double magnitude_lo = 0.0;         // translation magnitude sampled in (lo, hi];
  double magnitude_hi = 2.0;         // lo == hi fixes the magnitude (0 = pure rotation)
  double rotation_bound_rad = 0.5;   // per-axis Euler angle bound
  double depth_min = 4.0;
  double depth_max = 8.0;
  std::uint64_t seed = 0;

  void validate() const;
  static SceneConfig with_magnitude(double magnitude, SceneConfig base);
  static SceneConfig with_magnitude(double magnitude) {
    return with_magnitude(magnitude, SceneConfig{});
  }
};

struct SyntheticInstance {
  RelativePose ground_truth;
  double translation_magnitude = 0.0;  // before normalization
  std::vector<BearingPair> pairs;
  std::vector<BearingPair> clean_pairs;
  std::vector<std::pair<double, double>> point_depths;  // norms in view 0 / view 1
};

SyntheticInstance generate_scene(const SceneConfig& config);

/// Rotation error arccos((trace(R_true^T R) - 1) / 2) and translation error
/// arccos(t_true . t), both in degrees, arccos arguments clamped to [-1, 1].
/// No sign folding on the translation.
std::pair<double, double> pose_errors(const RelativePose& ground_truth,
                                      const RelativePose& estimate);

/// Orthonormal basis of the plane orthogonal to f (deterministic choice).
std::pair<Vec3, Vec3> tangent_basis(const Vec3& f);

}  // namespace relpose
