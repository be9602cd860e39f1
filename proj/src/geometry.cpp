#include "relpose/geometry.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace relpose {

UnitVector3::UnitVector3(const Vec3& v, double min_norm) {
  const double norm = v.norm();
  if (norm < min_norm) {
    throw DegenerateInput("cannot normalize near-zero vector (norm " + std::to_string(norm) + ")");
  }
  v_ = v / norm;
}

RotationMatrix RotationMatrix::from_matrix(const Mat3& m, double tolerance) {
  const Mat3 gram = m.transpose() * m;
  if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > tolerance) {
    throw DegenerateInput("matrix is not orthogonal within tolerance");
  }
  if (std::abs(m.determinant() - 1.0) > tolerance) {
    throw DegenerateInput("matrix determinant is not +1 within tolerance");
  }
  return RotationMatrix(m);
}

EssentialMatrix::EssentialMatrix() : m_(skew(Vec3(0.0, 0.0, 1.0))) {}

EssentialMatrix EssentialMatrix::from_matrix(const Mat3& m, double tolerance) {
  Eigen::JacobiSVD<Mat3> svd(m);
  const Vec3 sigma = svd.singularValues();
  if (std::abs(sigma(0) - 1.0) > tolerance || std::abs(sigma(1) - 1.0) > tolerance ||
      std::abs(sigma(2)) > tolerance) {
    throw DegenerateInput("singular values are not (1, 1, 0) within tolerance");
  }
  if (std::abs((m * m.transpose()).trace() - 2.0) > tolerance) {
    throw DegenerateInput("trace(EE^T) != 2 within tolerance");
  }
  return EssentialMatrix(m);
}

BearingPair::BearingPair(const UnitVector3& f0_in, const UnitVector3& f1_in, double weight_in)
    : f0(f0_in), f1(f1_in), weight(weight_in) {
  if (!(weight >= 0.0)) {
    throw DegenerateInput("correspondence weight must be nonnegative");
  }
}

Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(),  //
      v.z(), 0.0, -v.x(),   //
      -v.y(), v.x(), 0.0;
  return s;
}

Mat3 adjugate(const Mat3& m) {
  // Adj(M)(i,j) = M(j+1,i+1) M(j+2,i+2) - M(j+1,i+2) M(j+2,i+1), indices
  // mod 3; the cyclic selection absorbs the cofactor signs.
  Mat3 adj;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const int r1 = (j + 1) % 3, r2 = (j + 2) % 3;
      const int c1 = (i + 1) % 3, c2 = (i + 2) % 3;
      adj(i, j) = m(r1, c1) * m(r2, c2) - m(r1, c2) * m(r2, c1);
    }
  }
  return adj;
}

EssentialMatrix essential_from_pose(const RelativePose& pose) {
  return EssentialMatrix(skew(pose.translation.vec()) * pose.rotation.mat());
}

RotationMatrix project_to_so3(const Mat3& m, double singular_tol) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.singularValues()(2) < singular_tol) {
    throw DegenerateInput("projection onto SO(3) is ill-defined for a singular matrix");
  }
  const Mat3 u = svd.matrixU();
  const Mat3 v = svd.matrixV();
  const double det = (u * v.transpose()).determinant();
  return RotationMatrix::from_matrix(u * Vec3(1.0, 1.0, det).asDiagonal() * v.transpose());
}

double epipolar_residual(const EssentialMatrix& essential, const BearingPair& pair) {
  return pair.f0.vec().dot(essential.mat() * pair.f1.vec());
}

}  // namespace relpose
