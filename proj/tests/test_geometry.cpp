#include <doctest.h>

#include <Eigen/SVD>

#include "relpose/geometry.hpp"
#include "relpose/rng.hpp"
#include "support/helpers.hpp"

using namespace relpose;
using relpose::testing::random_pose;

TEST_SUITE_BEGIN("geometry");

TEST_CASE("skew matches the cross product definition") {
  Mat3 expected;
  expected << 0, 0, 0, 0, 0, -1, 0, 1, 0;
  CHECK((skew(Vec3(1, 0, 0)) - expected).norm() == 0.0);
  CHECK(skew(Vec3::Zero()).norm() == 0.0);

  CounterRng rng(7);
  for (int i = 0; i < 100; ++i) {
    const Vec3 v = 5.0 * rng.unit_vector();
    const Vec3 w = 3.0 * rng.unit_vector();
    CHECK((skew(v) * w - v.cross(w)).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((skew(v) + skew(v).transpose()).norm() == 0.0);
    // v lies in the nullspace of [v]x, exactly in structure.
    CHECK((skew(v) * v).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("adjugate satisfies the determinant identity") {
  CHECK((adjugate(Mat3::Identity()) - Mat3::Identity()).norm() == 0.0);

  const Mat3 rank2 = Vec3(0.7, 2.1, 0.0).asDiagonal();
  const Mat3 adj = adjugate(rank2);
  CHECK(adj(2, 2) == doctest::Approx(0.7 * 2.1).epsilon(1e-15));
  CHECK(adj.norm() == doctest::Approx(0.7 * 2.1).epsilon(1e-15));

  CounterRng rng(11);
  for (int i = 0; i < 100; ++i) {
    Mat3 m;
    for (int k = 0; k < 9; ++k) m(k / 3, k % 3) = rng.uniform(-2.0, 2.0);
    const Mat3 identity_scaled = adjugate(m) * m;
    CHECK((identity_scaled - m.determinant() * Mat3::Identity()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("adjugate of an essential matrix is the rank-1 outer product") {
  CounterRng rng(13);
  for (int i = 0; i < 200; ++i) {
    const RelativePose pose = random_pose(rng);
    const Mat3 e = skew(pose.translation.vec()) * pose.rotation.mat();
    const Vec3 q = pose.rotation.mat().transpose() * pose.translation.vec();
    const Mat3 expected = q * pose.translation.vec().transpose();
    CHECK((adjugate(e) - expected).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("matrices meeting the trace and adjugate conditions have singular values (1,1,0)") {
  CounterRng rng(17);
  for (int i = 0; i < 200; ++i) {
    // Random U, V in O(3), not necessarily rotations.
    Mat3 u = rng.rotation();
    Mat3 v = rng.rotation();
    if (rng.uniform() < 0.5) u.col(0) = -u.col(0);
    if (rng.uniform() < 0.5) v.col(1) = -v.col(1);
    const Mat3 m = u * Vec3(1.0, 1.0, 0.0).asDiagonal() * v.transpose();
    REQUIRE(std::abs((m * m.transpose()).trace() - 2.0) <= 1e-12);
    // Condition (ii): the adjugate is an outer product of unit vectors.
    Eigen::JacobiSVD<Mat3> adj_svd(adjugate(m));
    CHECK(adj_svd.singularValues()(0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(adj_svd.singularValues()(1) <= 1e-12);

    Eigen::JacobiSVD<Mat3> svd(m);
    CHECK(std::abs(svd.singularValues()(0) - 1.0) <= 1e-9);
    CHECK(std::abs(svd.singularValues()(1) - 1.0) <= 1e-9);
    CHECK(std::abs(svd.singularValues()(2)) <= 1e-9);
  }
}

TEST_CASE("essential_from_pose produces normalized essential matrices") {
  const RelativePose trivial{RotationMatrix::identity(), UnitVector3(Vec3(1, 0, 0))};
  CHECK((essential_from_pose(trivial).mat() - skew(Vec3(1, 0, 0))).norm() == 0.0);

  Mat3 expected;
  expected << 0, -1, 0, 1, 0, 0, 0, 0, 0;
  const RelativePose z_axis{RotationMatrix::identity(), UnitVector3(Vec3(0, 0, 1))};
  CHECK((essential_from_pose(z_axis).mat() - expected).norm() == 0.0);

  CounterRng rng(19);
  for (int i = 0; i < 100; ++i) {
    const EssentialMatrix e = essential_from_pose(random_pose(rng));
    Eigen::JacobiSVD<Mat3> svd(e.mat());
    CHECK(std::abs(svd.singularValues()(0) - 1.0) <= 1e-12);
    CHECK(std::abs(svd.singularValues()(1) - 1.0) <= 1e-12);
    CHECK(std::abs(svd.singularValues()(2)) <= 1e-12);
  }
}

TEST_CASE("project_to_so3 fixed points and scale invariance") {
  CounterRng rng(23);
  const Mat3 r = rng.rotation();
  CHECK((project_to_so3(r).mat() - r).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((project_to_so3(1.1 * r).mat() - r).cwiseAbs().maxCoeff() <= 1e-12);

  // Idempotence.
  Mat3 m;
  for (int k = 0; k < 9; ++k) m(k / 3, k % 3) = rng.uniform(-1.0, 1.0);
  m += 2.0 * Mat3::Identity();
  const Mat3 once = project_to_so3(m).mat();
  CHECK((project_to_so3(once).mat() - once).cwiseAbs().maxCoeff() <= 1e-12);

  CHECK_THROWS_AS(project_to_so3(Vec3(1.0, 1.0, 0.0).asDiagonal()), DegenerateInput);
}

TEST_CASE("project_to_so3 minimizes the Frobenius distance over sampled rotations") {
  CounterRng rng(29);
  Mat3 m;
  for (int k = 0; k < 9; ++k) m(k / 3, k % 3) = rng.uniform(-1.0, 1.0);
  m += Mat3::Identity();
  const Mat3 projected = project_to_so3(m).mat();
  const double best = (projected - m).norm();
  for (int i = 0; i < 10000; ++i) {
    CHECK((rng.rotation() - m).norm() >= best - 1e-12);
  }
}

TEST_CASE("epipolar residual") {
  CounterRng rng(31);
  const RelativePose pose = random_pose(rng);
  const EssentialMatrix e = essential_from_pose(pose);

  // Noise-free pairs generated from the same pose have zero residual.
  for (int i = 0; i < 50; ++i) {
    const Vec3 point = rng.unit_vector() * rng.uniform(4.0, 8.0);
    const Vec3 in_view1 =
        pose.rotation.mat().transpose() * (point - pose.translation.vec());
    const BearingPair pair{UnitVector3(point), UnitVector3(in_view1)};
    CHECK(std::abs(epipolar_residual(e, pair)) <= 1e-12);
  }

  // Hand-expanded case.
  const EssentialMatrix ez = EssentialMatrix::from_matrix(skew(Vec3(0, 0, 1)));
  const BearingPair axes{UnitVector3(Vec3(1, 0, 0)), UnitVector3(Vec3(0, 1, 0))};
  CHECK(epipolar_residual(ez, axes) == doctest::Approx(-1.0).epsilon(1e-15));

  // Triple-product oracle.
  for (int i = 0; i < 100; ++i) {
    const RelativePose p = random_pose(rng);
    const BearingPair pair{UnitVector3(rng.unit_vector()), UnitVector3(rng.unit_vector())};
    const double via_matrix = epipolar_residual(essential_from_pose(p), pair);
    const double via_cross =
        pair.f0.vec().dot(p.translation.vec().cross(p.rotation.mat() * pair.f1.vec()));
    CHECK(via_matrix == doctest::Approx(via_cross).epsilon(1e-12));
  }
}

TEST_CASE("type invariants are enforced") {
  CHECK_THROWS_AS(UnitVector3(Vec3(1e-10, 0, 0)), DegenerateInput);
  CHECK(UnitVector3(Vec3(3, 0, 0)).vec().isApprox(Vec3(1, 0, 0)));
  CHECK(std::abs(UnitVector3(Vec3(0.3, -0.4, 1.7)).vec().norm() - 1.0) <= 1e-12);

  Mat3 not_rotation = Mat3::Identity();
  not_rotation(0, 0) = 1.1;
  CHECK_THROWS_AS(RotationMatrix::from_matrix(not_rotation), DegenerateInput);
  Mat3 reflection = Mat3::Identity();
  reflection(2, 2) = -1.0;
  CHECK_THROWS_AS(RotationMatrix::from_matrix(reflection), DegenerateInput);

  CHECK_THROWS_AS(EssentialMatrix::from_matrix(Mat3::Identity()), DegenerateInput);
  CHECK_THROWS_AS(BearingPair(UnitVector3(Vec3(0, 0, 1)), UnitVector3(Vec3(0, 1, 0)), -1.0),
                  DegenerateInput);
}

TEST_SUITE_END();
