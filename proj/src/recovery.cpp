#include "relpose/recovery.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace relpose {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

int numeric_rank(const MatrixXd& m, double rank_tol) {
  const VectorXd eigs =
      Eigen::SelfAdjointEigenSolver<MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues();
  const double largest = eigs(eigs.size() - 1);
  if (largest <= 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < eigs.size(); ++i) {
    if (eigs(i) > rank_tol * largest) ++rank;
  }
  return rank;
}

std::vector<double> top_eigenvalues(const MatrixXd& m, int count) {
  VectorXd eigs = Eigen::SelfAdjointEigenSolver<MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues();
  std::vector<double> top;
  for (int i = eigs.size() - 1; i >= 0 && static_cast<int>(top.size()) < count; --i) {
    top.push_back(eigs(i));
  }
  return top;
}

Mat3 matrix_from_rowvec(const Vec9& e) {
  Mat3 m;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m(r, c) = e(3 * r + c);
  }
  return m;
}

}  // namespace

ExtractedParams extract_dominant(const MatrixXd& block16) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(block16);
  const int last = static_cast<int>(block16.rows()) - 1;
  if (eig.eigenvalues()(last) < 1e-9) {
    throw DegenerateSpectrum("solution block has no significant eigenvalue");
  }
  VectorXd v = eig.eigenvectors().col(last);
  if (v(15) < 0.0) v = -v;  // fix the spurious h = -1 solution
  ExtractedParams params;
  params.e = v.segment<9>(0);
  params.t = v.segment<3>(9);
  params.q = v.segment<3>(12);
  params.h = v(15);
  return params;
}

RescaledEstimates rescale_estimates(const Vec9& e, const Vec3& t, const Vec3& q) {
  if (t.norm() < tol::kMinVectorNorm || q.norm() < tol::kMinVectorNorm) {
    throw DegenerateInput("translation estimates vanish; cannot rescale");
  }
  const Mat3 raw = matrix_from_rowvec(e);
  Eigen::JacobiSVD<Mat3> svd(raw, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.singularValues()(1) < tol::kMinVectorNorm) {
    throw DegenerateInput("essential estimate is not rank 2; cannot rescale");
  }
  const Mat3 rebuilt =
      svd.matrixU() * Vec3(1.0, 1.0, 0.0).asDiagonal() * svd.matrixV().transpose();
  return RescaledEstimates{EssentialMatrix::from_matrix(rebuilt), UnitVector3(t), UnitVector3(q)};
}

double read_slack_squared(const MatrixXd& full_x) {
  const ParamLayout layout = ParamLayout::full();
  return std::max(0.0, full_x(layout.s_t(), layout.s_t()));
}

ExtractedParams pure_rotation_path(const MatrixXd& full_x, const ExtractedParams& prior) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(full_x.topLeftCorner(15, 15));
  VectorXd v = eig.eigenvectors().col(14);
  VectorXd prior_vec(15);
  prior_vec << prior.e, prior.t, prior.q;
  if (v.dot(prior_vec) < 0.0) v = -v;  // keep the numerically-inaccurate prior's sign
  ExtractedParams params;
  params.e = v.segment<9>(0);
  params.t = v.segment<3>(9);
  params.q = v.segment<3>(12);
  params.h = prior.h;
  return params;
}

RotationMatrix recover_rotation(const EssentialMatrix& essential, const UnitVector3& t,
                                const UnitVector3& q) {
  const Mat3& e = essential.mat();
  const Mat3 raw =
      t.vec() * q.vec().transpose() - 0.5 * (skew(t.vec()) * e + e * skew(q.vec()));
  return project_to_so3(raw);
}

CertificateReport certify(const MatrixXd& full_x, double rank_tol) {
  CertificateReport report;
  report.rank_tol = rank_tol;
  report.rank_full_block = numeric_rank(full_x.topLeftCorner(16, 16), rank_tol);
  report.rank_e_block = numeric_rank(full_x.topLeftCorner(9, 9), rank_tol);
  report.rank_tq_block = numeric_rank(full_x.block(9, 9, 6, 6), rank_tol);
  report.pass = report.rank_full_block >= 1 && report.rank_full_block <= 3 &&
                report.rank_e_block == 1 && report.rank_tq_block == 1;
  return report;
}

CertificateReport certify_baseline(const MatrixXd& x12, double rank_tol) {
  CertificateReport report;
  report.rank_tol = rank_tol;
  report.rank_full_block = numeric_rank(x12, rank_tol);
  report.rank_e_block = numeric_rank(x12.topLeftCorner(9, 9), rank_tol);
  report.rank_tq_block = numeric_rank(x12.block(9, 9, 3, 3), rank_tol);
  report.pass = report.rank_full_block >= 1 && report.rank_full_block <= 2 &&
                report.rank_e_block == 1 && report.rank_tq_block == 1;
  return report;
}

PoseEstimate recover_c2p(const SdpSolution& solution, const EstimatorOptions& options) {
  const MatrixXd& x = solution.X;
  ExtractedParams params = extract_dominant(x.topLeftCorner(16, 16));
  const double s_t2 = read_slack_squared(x);
  const CertificateReport certificate = certify(x, options.rank_tol);

  // Noise-free near-pure rotations concentrate the dominant eigenvector on
  // h, degrading the other estimates; re-extract without h in that regime.
  if (s_t2 < 1e-4) {
    params = pure_rotation_path(x, params);
  }

  RescaledEstimates rescaled = rescale_estimates(params.e, params.t, params.q);
  const RotationMatrix rotation = recover_rotation(rescaled.essential, rescaled.t, rescaled.q);

  PoseEstimate estimate{
      rescaled.essential,
      RelativePose{rotation, rescaled.t},
      rescaled.q,
      s_t2,
      certificate.pass && solution.status == SolverStatus::kOptimal,
      s_t2 < options.eps_t,
      top_eigenvalues(x.topLeftCorner(16, 16), 8),
      solution.relative_gap,
      certificate,
      solution.status,
  };
  return estimate;
}

PoseEstimate solve_c2p(const std::vector<BearingPair>& pairs, const EstimatorOptions& options) {
  if (options.variant != Variant::kC2p && options.variant != Variant::kC2pFast) {
    throw Error("solve_c2p expects a single-step variant");
  }
  const QcqpProblem qcqp = build_qcqp(pairs, options.variant);
  const SdpSolution solution = solve(SdpProblem::from_qcqp(qcqp), options.solver);
  return recover_c2p(solution, options);
}

}  // namespace relpose
