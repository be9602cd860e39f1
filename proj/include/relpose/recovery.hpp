#pragma once

#include <vector>

#include "relpose/geometry.hpp"
#include "relpose/problem.hpp"
#include "relpose/sdp.hpp"

namespace relpose {

/// Numeric-rank certificate of the relaxation. For the full problem pass
/// requires rank(X_[0:16]) in [1,3] with rank-1 e- and tq-blocks; for the
/// baseline, rank(X) in [1,2] with rank-1 e- and t-blocks (rank_tq_block
/// then reports the 3x3 t-block).
struct CertificateReport {
  int rank_full_block = 0;
  int rank_e_block = 0;
  int rank_tq_block = 0;
  double rank_tol = 0.0;
  bool pass = false;
};

/// Final estimate shared by the single-step and two-step pipelines.
struct PoseEstimate {
  EssentialMatrix essential;
  RelativePose pose;
  UnitVector3 q;  // rotated translation R^T t
  double s_t_squared = 0.0;
  bool certified = false;
  bool is_pure_rotation = false;
  std::vector<double> eigenvalue_report;  // top-8 eigenvalues of the solution block
  double solver_gap = 0.0;
  CertificateReport certificate;
  SolverStatus solver_status = SolverStatus::kNumericalFailure;
};

/// Parameters extracted from a dominant eigenvector, prior to rescaling.
struct ExtractedParams {
  Vec9 e;
  Vec3 t;
  Vec3 q;
  double h = 1.0;
};

/// Dominant eigenvector of the 16x16 solution block, sign-normalized so the
/// homogenization component is positive, partitioned per the layout.
ExtractedParams extract_dominant(const Eigen::MatrixXd& block16);

/// Enforces the norm constraints on raw estimates: t and q normalized to
/// unit, E rebuilt from its SVD with singular values (1, 1, 0).
struct RescaledEstimates {
  EssentialMatrix essential;
  UnitVector3 t;
  UnitVector3 q;
};
RescaledEstimates rescale_estimates(const Vec9& e, const Vec3& t, const Vec3& q);

/// s_t^2 read straight off the slack diagonal of the full solution matrix
/// (no factorization needed; the slack has no products with other
/// parameters). Clamped at zero from below.
double read_slack_squared(const Eigen::MatrixXd& full_x);

/// Numerical-accuracy path for (near-)pure rotations: dominant eigenvector
/// of the leading 15x15 block (excluding h), sign-aligned with the prior
/// estimate.
ExtractedParams pure_rotation_path(const Eigen::MatrixXd& full_x, const ExtractedParams& prior);

/// Closed-form rotation recovery R = t q^T - ([t]x E + E [q]x) / 2,
/// projected onto SO(3).
RotationMatrix recover_rotation(const EssentialMatrix& essential, const UnitVector3& t,
                                const UnitVector3& q);

/// Rank certificate for the full problem (Variant::kC2p / kC2pFast).
CertificateReport certify(const Eigen::MatrixXd& full_x, double rank_tol = 1e-5);

/// Rank certificate for the 12-dim baseline problem.
CertificateReport certify_baseline(const Eigen::MatrixXd& x12, double rank_tol = 1e-5);

struct EstimatorOptions {
  Variant variant = Variant::kC2p;
  double eps_t = 1e-3;   // user-facing pure-rotation classification threshold
  double rank_tol = 1e-5;
  SolverConfig solver;
};

/// Recovery stage of the single-step pipeline, given a solved relaxation.
PoseEstimate recover_c2p(const SdpSolution& solution, const EstimatorOptions& options);

/// End-to-end single-step estimate: build, solve, recover, certify.
PoseEstimate solve_c2p(const std::vector<BearingPair>& pairs,
                       const EstimatorOptions& options = {});

}  // namespace relpose
