#pragma once

#include <vector>

#include "relpose/geometry.hpp"
#include "relpose/problem.hpp"
#include "relpose/rng.hpp"
#include "relpose/synthetic.hpp"

namespace relpose::testing {

inline RelativePose random_pose(CounterRng& rng) {
  return RelativePose{RotationMatrix::from_matrix(rng.rotation()), UnitVector3(rng.unit_vector())};
}

/// Ground-truth lifted vector [e, t, q, h, s_r, s_t] of a noise-free
/// instance, with the slack values implied by the averaged constraints.
inline Eigen::VectorXd lift_solution(const RelativePose& pose,
                                     const std::vector<BearingPair>& pairs) {
  const ParamLayout layout = ParamLayout::full();
  const Mat3 e = essential_from_pose(pose).mat();
  const Vec3& t = pose.translation.vec();
  const Vec3 q = pose.rotation.mat().transpose() * t;

  const AveragedCoefficients avg = average_coefficients(pairs);
  const Mat3 m = avg.mean_f0_f1t();  // mean(f0 f1^T)
  const double rot_value = (e.transpose() * skew(t) * m).trace();
  const double trans_value = avg.t3.dot(t) + avg.q3.dot(q);

  Eigen::VectorXd x(layout.dim);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) x(layout.e(r, c)) = e(r, c);
  }
  x.segment<3>(layout.t(0)) = t;
  x.segment<3>(layout.q(0)) = q;
  x(layout.h()) = 1.0;
  x(layout.s_r()) = std::sqrt(std::max(0.0, rot_value));
  x(layout.s_t()) = std::sqrt(std::max(0.0, trans_value));
  return x;
}

/// Lifted vector of the 12-dim baseline layout.
inline Eigen::VectorXd lift_solution_z(const RelativePose& pose) {
  const Mat3 e = essential_from_pose(pose).mat();
  Eigen::VectorXd x(12);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) x(3 * r + c) = e(r, c);
  }
  x.segment<3>(9) = pose.translation.vec();
  return x;
}

/// Independent oracle for the averaged rotation-disambiguation constraint:
/// the 18-term coefficient expansion, one correspondence at a time.
inline double rotation_constraint_terms(const Vec3& f0, const Vec3& f1, const Vec9& e,
                                        const Vec3& t) {
  struct Term {
    int f0_idx, f1_idx, e_idx, t_idx;
    double sign;
  };
  static const Term kTerms[] = {
      {0, 0, 3, 2, 1.0}, {0, 1, 4, 2, 1.0}, {0, 2, 5, 2, 1.0},    //
      {1, 0, 6, 0, 1.0}, {1, 1, 7, 0, 1.0}, {1, 2, 8, 0, 1.0},    //
      {2, 0, 0, 1, 1.0}, {2, 1, 1, 1, 1.0}, {2, 2, 2, 1, 1.0},    //
      {0, 0, 6, 1, -1.0}, {0, 1, 7, 1, -1.0}, {0, 2, 8, 1, -1.0},  //
      {1, 0, 0, 2, -1.0}, {1, 1, 1, 2, -1.0}, {1, 2, 2, 2, -1.0},  //
      {2, 0, 3, 0, -1.0}, {2, 1, 4, 0, -1.0}, {2, 2, 5, 0, -1.0},
  };
  double acc = 0.0;
  for (const Term& term : kTerms) {
    acc += term.sign * f0(term.f0_idx) * f1(term.f1_idx) * e(term.e_idx) * t(term.t_idx);
  }
  return acc;
}

inline std::vector<BearingPair> random_pairs(CounterRng& rng, int n) {
  std::vector<BearingPair> pairs;
  pairs.reserve(n);
  for (int i = 0; i < n; ++i) {
    pairs.emplace_back(UnitVector3(rng.unit_vector()), UnitVector3(rng.unit_vector()));
  }
  return pairs;
}

inline SyntheticInstance general_motion_scene(std::uint64_t seed, int n, double noise_px) {
  SceneConfig config;
  config.n = n;
  config.noise_px = noise_px;
  config.seed = seed;
  config.magnitude_lo = 0.5;  // well away from the pure-rotation regime
  config.magnitude_hi = 2.0;
  return generate_scene(config);
}

}  // namespace relpose::testing
