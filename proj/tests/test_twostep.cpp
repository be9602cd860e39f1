#include <doctest.h>

#include "relpose/rng.hpp"
#include "relpose/twostep.hpp"
#include "support/helpers.hpp"

using namespace relpose;
using namespace relpose::testing;

namespace {

/// Cross-product form of the cheirality test, used as the independent
/// oracle for the depth-sign implementations.
std::pair<bool, bool> cross_product_signs(const RelativePose& pose, const BearingPair& pair) {
  const Vec3 rf1 = pose.rotation.mat() * pair.f1.vec();
  const Vec3& f0 = pair.f0.vec();
  const Vec3& t = pose.translation.vec();
  const Vec3 normal = rf1.cross(f0);
  const bool first = normal.dot(f0.cross(t)) > 0.0;    // lambda_1 sign
  const bool second = normal.dot(rf1.cross(t)) > 0.0;  // lambda_0 sign
  return {second, first};                              // (front0, front1)
}

}  // namespace

TEST_SUITE_BEGIN("twostep");

TEST_CASE("decompose_essential round trip") {
  CounterRng rng(601);
  for (int i = 0; i < 50; ++i) {
    const RelativePose pose = random_pose(rng);
    const EssentialMatrix e = essential_from_pose(pose);
    const FourPoseCandidates candidates = decompose_essential(e);

    int matches = 0;
    for (const RelativePose& candidate : candidates.poses) {
      const auto [rot_err, trans_err] = pose_errors(pose, candidate);
      if (rot_err <= 1e-9 * 180.0 / M_PI && trans_err <= 1e-9 * 180.0 / M_PI) ++matches;
      // Every candidate reproduces the same epipolar geometry up to sign.
      const Mat3 rebuilt = essential_from_pose(candidate).mat();
      const double dist =
          std::min((rebuilt - e.mat()).cwiseAbs().maxCoeff(), (rebuilt + e.mat()).cwiseAbs().maxCoeff());
      CHECK(dist <= 1e-9);
    }
    CHECK(matches == 1);
  }
}

TEST_CASE("all four candidates share the epipolar cost") {
  const SyntheticInstance scene = general_motion_scene(602, 20, 1.0);
  const Eigen::MatrixXd cost = build_cost(scene.pairs);
  const FourPoseCandidates candidates =
      decompose_essential(essential_from_pose(scene.ground_truth));
  Eigen::VectorXd values(4);
  for (int p = 0; p < 4; ++p) {
    Vec9 e;
    const Mat3 m = essential_from_pose(candidates.poses[p]).mat();
    for (int k = 0; k < 9; ++k) e(k) = m(k / 3, k % 3);
    values(p) = e.dot(cost * e);
  }
  CHECK((values.array() - values(0)).abs().maxCoeff() <= 1e-12 * (1.0 + values(0)));
}

TEST_CASE("midpoint_signs") {
  SUBCASE("true pose sees every noise-free point in front") {
    const SyntheticInstance scene = general_motion_scene(603, 50, 0.0);
    for (const BearingPair& pair : scene.pairs) {
      const MidpointSigns signs = midpoint_signs(scene.ground_truth, pair);
      CHECK_FALSE(signs.degenerate);
      CHECK(signs.front0);
      CHECK(signs.front1);
    }
  }

  SUBCASE("flipping the translation breaks at least one sign") {
    const SyntheticInstance scene = general_motion_scene(604, 50, 0.0);
    const RelativePose flipped{scene.ground_truth.rotation,
                               UnitVector3(-scene.ground_truth.translation.vec())};
    for (const BearingPair& pair : scene.pairs) {
      const MidpointSigns signs = midpoint_signs(flipped, pair);
      CHECK((!signs.front0 || !signs.front1));
    }
  }

  SUBCASE("parallel rays abstain") {
    const RelativePose identity_pose{RotationMatrix::identity(), UnitVector3(Vec3(1, 0, 0))};
    const BearingPair parallel{UnitVector3(Vec3(0, 0, 1)), UnitVector3(Vec3(0, 0, 1))};
    CHECK(midpoint_signs(identity_pose, parallel).degenerate);
  }
}

TEST_CASE("depth-sign equivalence across all three formulations") {
  CounterRng rng(605);
  int checked = 0;
  while (checked < 10000) {
    const RelativePose pose = random_pose(rng);
    const BearingPair pair{UnitVector3(rng.unit_vector()), UnitVector3(rng.unit_vector())};
    const MidpointSigns fast = midpoint_signs(pose, pair);
    const TriangulationResult tri = triangulation_check(pose, pair);
    CHECK(fast.degenerate == tri.degenerate);
    if (fast.degenerate) continue;
    const auto [front0, front1] = cross_product_signs(pose, pair);
    CHECK(fast.front0 == front0);
    CHECK(fast.front1 == front1);
    CHECK(tri.front0 == front0);
    CHECK(tri.front1 == front1);
    ++checked;
  }
}

TEST_CASE("triangulation recovers ground-truth depths under the true pose") {
  const SyntheticInstance scene = general_motion_scene(606, 30, 0.0);
  for (size_t i = 0; i < scene.pairs.size(); ++i) {
    const TriangulationResult tri = triangulation_check(scene.ground_truth, scene.pairs[i]);
    REQUIRE_FALSE(tri.degenerate);
    CHECK(tri.depth0 == doctest::Approx(scene.point_depths[i].first).epsilon(1e-9));
    CHECK(tri.depth1 == doctest::Approx(scene.point_depths[i].second).epsilon(1e-9));
    // The midpoint reproduces the 3D point in view 0.
    CHECK((tri.midpoint - tri.depth0 * scene.pairs[i].f0.vec()).norm() <= 1e-9);
  }
}

TEST_CASE("the reflected rotation loses the vote") {
  const SyntheticInstance scene = general_motion_scene(607, 60, 0.0);
  const FourPoseCandidates candidates =
      decompose_essential(essential_from_pose(scene.ground_truth));
  // Identify a reflected-rotation candidate (rotation far from truth).
  for (const RelativePose& candidate : candidates.poses) {
    const auto [rot_err, trans_err] = pose_errors(scene.ground_truth, candidate);
    if (rot_err < 90.0) continue;
    int in_front = 0;
    for (const BearingPair& pair : scene.pairs) {
      const TriangulationResult tri = triangulation_check(candidate, pair);
      if (!tri.degenerate && tri.front0 && tri.front1) ++in_front;
    }
    CHECK(in_front < static_cast<int>(scene.pairs.size()) / 2);
  }
}

TEST_CASE("disambiguate") {
  const SyntheticInstance scene = general_motion_scene(608, 80, 0.0);
  const FourPoseCandidates candidates =
      decompose_essential(essential_from_pose(scene.ground_truth));

  SUBCASE("noise-free scenes vote unanimously for the true pose") {
    for (DisambiguationMethod method :
         {DisambiguationMethod::kMidpointSigns, DisambiguationMethod::kTriangulation}) {
      const auto [pose, vote] = disambiguate(candidates, scene.pairs, method);
      const auto [rot_err, trans_err] = pose_errors(scene.ground_truth, pose);
      CHECK(rot_err <= 1e-6);
      CHECK(trans_err <= 1e-6);
      CHECK(vote.counts[vote.winner] == static_cast<int>(scene.pairs.size()));
      CHECK_FALSE(vote.tie);
      CHECK(vote.margin > 0);
    }
  }

  SUBCASE("noisy scenes almost never mis-vote") {
    int correct = 0;
    const int trials = 200;
    for (int trial = 0; trial < trials; ++trial) {
      const SyntheticInstance noisy =
          general_motion_scene(CounterRng::derive(609, {static_cast<std::uint64_t>(trial)}), 100,
                               1.0);
      const FourPoseCandidates c = decompose_essential(essential_from_pose(noisy.ground_truth));
      const auto [pose, vote] =
          disambiguate(c, noisy.pairs, DisambiguationMethod::kMidpointSigns);
      const auto [rot_err, trans_err] = pose_errors(noisy.ground_truth, pose);
      if (rot_err < 1.0 && trans_err < 90.0) ++correct;
    }
    CHECK(correct == trials);
  }

  SUBCASE("single abstaining pair throws") {
    const RelativePose identity_pose{RotationMatrix::identity(), UnitVector3(Vec3(0, 0, 1))};
    const EssentialMatrix e = essential_from_pose(identity_pose);
    const FourPoseCandidates degenerate_candidates = decompose_essential(e);
    // A correspondence exactly along the rotation axis abstains under every
    // candidate (all candidate rotations keep f1 parallel to f0).
    std::vector<BearingPair> pairs{{UnitVector3(Vec3(0, 0, 1)), UnitVector3(Vec3(0, 0, 1))}};
    CHECK_THROWS_AS(disambiguate(degenerate_candidates, pairs, DisambiguationMethod::kMidpointSigns),
                    AllAbstained);
  }

  CHECK_THROWS_AS(disambiguate(candidates, {}, DisambiguationMethod::kMidpointSigns), EmptyInput);
}

TEST_CASE("solve_two_step matches the single-step estimate on noise-free scenes") {
  const SyntheticInstance scene = general_motion_scene(610, 40, 0.0);
  EstimatorOptions c2p_options;
  const PoseEstimate reference = solve_c2p(scene.pairs, c2p_options);

  for (Variant variant : {Variant::kQcqpZ, Variant::kQcqpZRedundant}) {
    for (DisambiguationMethod method :
         {DisambiguationMethod::kMidpointSigns, DisambiguationMethod::kTriangulation}) {
      TwoStepOptions options;
      options.variant = variant;
      options.method = method;
      const PoseEstimate estimate = solve_two_step(scene.pairs, options);
      CHECK(estimate.certified);
      const auto [rot_diff, trans_diff] = pose_errors(reference.pose, estimate.pose);
      CHECK(rot_diff <= 1e-8 * 180.0 / M_PI + 1e-8);
      CHECK(trans_diff <= 1e-8 * 180.0 / M_PI + 1e-8);
    }
  }
}

TEST_CASE("baseline tightness on noisy scenes") {
  for (double noise : {0.5, 5.0, 10.0}) {
    const SyntheticInstance scene =
        general_motion_scene(CounterRng::derive(611, {static_cast<std::uint64_t>(noise * 10)}), 50,
                             noise);
    TwoStepOptions options;
    const PoseEstimate estimate = solve_two_step(scene.pairs, options);
    CHECK(estimate.certified);
    CHECK(estimate.certificate.rank_full_block >= 1);
    CHECK(estimate.certificate.rank_full_block <= 2);
  }
}

TEST_SUITE_END();
