#include "relpose/twostep.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

namespace relpose {

FourPoseCandidates decompose_essential(const EssentialMatrix& essential) {
  Eigen::JacobiSVD<Mat3> svd(essential.mat(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 sigma = svd.singularValues();
  if (sigma(1) < 1e-3 || sigma(2) > 1e-3) {
    throw NotRankTwo("essential matrix does not have singular values (1, 1, 0)");
  }
  Mat3 u = svd.matrixU();
  Mat3 v = svd.matrixV();
  // Flipping the third columns leaves E unchanged (zero singular value) and
  // makes both factors proper rotations.
  if (u.determinant() < 0.0) u.col(2) = -u.col(2);
  if (v.determinant() < 0.0) v.col(2) = -v.col(2);
  Mat3 w;
  w << 0.0, -1.0, 0.0,  //
      1.0, 0.0, 0.0,    //
      0.0, 0.0, 1.0;
  const RotationMatrix r_a = RotationMatrix::from_matrix(u * w * v.transpose());
  const RotationMatrix r_b = RotationMatrix::from_matrix(u * w.transpose() * v.transpose());
  const UnitVector3 tu(u.col(2));
  const UnitVector3 tn(-u.col(2));
  return FourPoseCandidates{{RelativePose{r_a, tu}, RelativePose{r_a, tn},  //
                             RelativePose{r_b, tu}, RelativePose{r_b, tn}}};
}

MidpointSigns midpoint_signs(const RelativePose& pose, const BearingPair& pair) {
  const Vec3 rf1 = pose.rotation.mat() * pair.f1.vec();
  const Vec3& f0 = pair.f0.vec();
  const Vec3& t = pose.translation.vec();
  const double c = f0.dot(rf1);
  const double s2 = 1.0 - c * c;
  if (s2 < 1e-12) {
    return MidpointSigns{false, false, true};
  }
  const double f0t = f0.dot(t);
  const double rf1t = rf1.dot(t);
  const double depth0_scaled = f0t - c * rf1t;   // s^2 lambda_0
  const double depth1_scaled = -rf1t + c * f0t;  // s^2 lambda_1
  return MidpointSigns{depth0_scaled > 0.0, depth1_scaled > 0.0, false};
}

TriangulationResult triangulation_check(const RelativePose& pose, const BearingPair& pair) {
  const Vec3 rf1 = pose.rotation.mat() * pair.f1.vec();
  const Vec3& f0 = pair.f0.vec();
  const Vec3& t = pose.translation.vec();
  const double c = f0.dot(rf1);
  const double s2 = 1.0 - c * c;
  if (s2 < 1e-12) {
    return TriangulationResult{false, false, true, 0.0, 0.0, Vec3::Zero()};
  }
  // Normal equations of min |lambda_0 f0 - (lambda_1 R f1 + t)|^2.
  Eigen::Matrix2d gram;
  gram << 1.0, -c, -c, 1.0;
  const Eigen::Vector2d rhs(f0.dot(t), -rf1.dot(t));
  const Eigen::Vector2d depths = gram.inverse() * rhs;
  TriangulationResult result;
  result.depth0 = depths(0);
  result.depth1 = depths(1);
  result.front0 = depths(0) > 0.0;
  result.front1 = depths(1) > 0.0;
  result.midpoint = 0.5 * (depths(0) * f0 + depths(1) * rf1 + t);
  return result;
}

std::pair<RelativePose, CheiralityVote> disambiguate(const FourPoseCandidates& candidates,
                                                     const std::vector<BearingPair>& pairs,
                                                     DisambiguationMethod method) {
  if (pairs.empty()) {
    throw EmptyInput("cannot disambiguate without correspondences");
  }
  CheiralityVote vote;
  int usable = 0;
  for (int p = 0; p < 4; ++p) {
    for (const BearingPair& pair : pairs) {
      bool front0 = false, front1 = false, degenerate = false;
      if (method == DisambiguationMethod::kMidpointSigns) {
        const MidpointSigns signs = midpoint_signs(candidates.poses[p], pair);
        front0 = signs.front0;
        front1 = signs.front1;
        degenerate = signs.degenerate;
      } else {
        const TriangulationResult tri = triangulation_check(candidates.poses[p], pair);
        front0 = tri.front0;
        front1 = tri.front1;
        degenerate = tri.degenerate;
      }
      if (degenerate) {
        ++vote.abstentions[p];
        continue;
      }
      ++usable;
      if (front0 && front1) ++vote.counts[p];
    }
  }
  if (usable == 0) {
    throw AllAbstained("all correspondences have (near-)parallel rays under every candidate");
  }
  vote.winner = 0;
  for (int p = 1; p < 4; ++p) {
    if (vote.counts[p] > vote.counts[vote.winner]) vote.winner = p;
  }
  int runner_up = -1;
  for (int p = 0; p < 4; ++p) {
    if (p == vote.winner) continue;
    if (runner_up < 0 || vote.counts[p] > vote.counts[runner_up]) runner_up = p;
    if (p != vote.winner && vote.counts[p] == vote.counts[vote.winner]) vote.tie = true;
  }
  vote.margin = vote.counts[vote.winner] - vote.counts[runner_up];
  return {candidates.poses[vote.winner], vote};
}

EssentialMatrix essential_from_baseline(const Eigen::MatrixXd& x12) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(x12.topLeftCorner(9, 9));
  if (eig.eigenvalues()(8) < 1e-9) {
    throw DegenerateSpectrum("e-block of the baseline solution has no significant eigenvalue");
  }
  const Eigen::VectorXd e = eig.eigenvectors().col(8);
  Mat3 raw;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) raw(r, c) = e(3 * r + c);
  }
  Eigen::JacobiSVD<Mat3> svd(raw, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.singularValues()(1) < tol::kMinVectorNorm) {
    throw NotRankTwo("baseline essential estimate is not rank 2");
  }
  const Mat3 rebuilt =
      svd.matrixU() * Vec3(1.0, 1.0, 0.0).asDiagonal() * svd.matrixV().transpose();
  return EssentialMatrix::from_matrix(rebuilt);
}

PoseEstimate recover_two_step(const SdpSolution& solution, const std::vector<BearingPair>& pairs,
                              const TwoStepOptions& options) {
  const EssentialMatrix essential = essential_from_baseline(solution.X);
  const FourPoseCandidates candidates = decompose_essential(essential);
  auto [pose, vote] = disambiguate(candidates, pairs, options.method);
  const CertificateReport certificate = certify_baseline(solution.X, options.rank_tol);

  const UnitVector3 q(pose.rotation.mat().transpose() * pose.translation.vec());
  // The baseline has no slack variable; evaluate the same averaged
  // translation-disambiguation quantity on the winning pose instead.
  const AveragedCoefficients avg = average_coefficients(pairs);
  const double s_t2 =
      std::max(0.0, avg.t3.dot(pose.translation.vec()) + avg.q3.dot(q.vec()));

  std::vector<double> eigenvalue_report;
  {
    Eigen::VectorXd eigs = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                               solution.X, Eigen::EigenvaluesOnly)
                               .eigenvalues();
    for (int i = static_cast<int>(eigs.size()) - 1;
         i >= 0 && eigenvalue_report.size() < 8; --i) {
      eigenvalue_report.push_back(eigs(i));
    }
  }

  // Rebuild E from the winner so the reported quantities are mutually
  // consistent (the extracted e-block only fixes E up to sign).
  const EssentialMatrix consistent = essential_from_pose(pose);
  return PoseEstimate{
      consistent,
      pose,
      q,
      s_t2,
      certificate.pass && solution.status == SolverStatus::kOptimal,
      s_t2 < options.eps_t,
      eigenvalue_report,
      solution.relative_gap,
      certificate,
      solution.status,
  };
}

PoseEstimate solve_two_step(const std::vector<BearingPair>& pairs, const TwoStepOptions& options) {
  if (options.variant != Variant::kQcqpZ && options.variant != Variant::kQcqpZRedundant) {
    throw Error("solve_two_step expects a two-step variant");
  }
  const QcqpProblem qcqp = build_qcqp(pairs, options.variant);
  const SdpSolution solution = solve(SdpProblem::from_qcqp(qcqp), options.solver);
  return recover_two_step(solution, pairs, options);
}

}  // namespace relpose
