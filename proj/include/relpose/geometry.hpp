#pragma once

#include <vector>

#include "relpose/types.hpp"

namespace relpose {

/// Unit-norm direction vector. The constructor normalizes its input and
/// rejects vectors with norm below min_norm instead of silently inflating
/// numerical noise into a direction.
class UnitVector3 {
 public:
  UnitVector3() : v_(0.0, 0.0, 1.0) {}
  explicit UnitVector3(const Vec3& v, double min_norm = tol::kMinVectorNorm);

  const Vec3& vec() const { return v_; }
  double x() const { return v_.x(); }
  double y() const { return v_.y(); }
  double z() const { return v_.z(); }

 private:
  Vec3 v_;
};

/// Element of SO(3). Construction validates orthogonality and determinant.
class RotationMatrix {
 public:
  RotationMatrix() : m_(Mat3::Identity()) {}
  static RotationMatrix from_matrix(const Mat3& m, double tolerance = tol::kRotation);
  static RotationMatrix identity() { return RotationMatrix(Mat3::Identity()); }

  const Mat3& mat() const { return m_; }

 private:
  explicit RotationMatrix(const Mat3& m) : m_(m) {}
  Mat3 m_;
};

/// Normalized essential matrix: singular values (1, 1, 0), trace(EE^T) = 2.
class EssentialMatrix {
 public:
  EssentialMatrix();  // identity rotation, +z translation
  static EssentialMatrix from_matrix(const Mat3& m, double tolerance = tol::kEssential);

  const Mat3& mat() const { return m_; }

 private:
  explicit EssentialMatrix(const Mat3& m) : m_(m) {}
  Mat3 m_;
  friend EssentialMatrix essential_from_pose(const class RelativePose&);
};

/// One correspondence: unit bearings in each view plus an optional weight.
struct BearingPair {
  BearingPair(const UnitVector3& f0_in, const UnitVector3& f1_in, double weight_in = 1.0);

  UnitVector3 f0;
  UnitVector3 f1;
  double weight = 1.0;
};

/// Relative pose (R, t) with unit-norm translation (scale is unobservable).
struct RelativePose {
  RotationMatrix rotation;
  UnitVector3 translation;
};

/// Cross-product matrix: skew(v) * w == v x w.
Mat3 skew(const Vec3& v);

/// Adjugate via the 3x3 cofactor formula. Defined for singular input too.
Mat3 adjugate(const Mat3& m);

/// E = [t]x R.
EssentialMatrix essential_from_pose(const RelativePose& pose);

/// Nearest rotation in Frobenius norm, via SVD with determinant correction.
/// Throws DegenerateInput when the smallest singular value is below
/// singular_tol.
RotationMatrix project_to_so3(const Mat3& m, double singular_tol = tol::kSingular);

/// Signed epipolar residual f0^T E f1 (the cost squares it).
double epipolar_residual(const EssentialMatrix& essential, const BearingPair& pair);

}  // namespace relpose
