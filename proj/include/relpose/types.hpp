#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace relpose {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec9 = Eigen::Matrix<double, 9, 1>;

/// Base class for all errors thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyInput : Error {
  using Error::Error;
};
struct TooFewCorrespondences : Error {
  using Error::Error;
};
struct DegenerateInput : Error {
  using Error::Error;
};
struct DegenerateSpectrum : Error {
  using Error::Error;
};
struct NotRankTwo : Error {
  using Error::Error;
};
struct AllAbstained : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};

// Default tolerances. All are overridable per call where they appear as
// defaulted parameters.
namespace tol {
inline constexpr double kUnitNorm = 1e-12;       // |v| - 1 after normalization
inline constexpr double kMinVectorNorm = 1e-9;   // smallest normalizable input
inline constexpr double kRotation = 1e-9;        // orthogonality / determinant
inline constexpr double kEssential = 1e-6;       // manifold membership
inline constexpr double kSingular = 1e-12;       // singular-input detection
}  // namespace tol

}  // namespace relpose
