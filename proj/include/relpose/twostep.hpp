#pragma once

#include <array>
#include <vector>

#include "relpose/geometry.hpp"
#include "relpose/recovery.hpp"

namespace relpose {

/// The four relative poses sharing one epipolar geometry:
/// {(R_a, u), (R_a, -u), (R_b, u), (R_b, -u)}.
struct FourPoseCandidates {
  std::array<RelativePose, 4> poses;
};

/// Aggregated front-of-both-cameras votes over all correspondences.
struct CheiralityVote {
  std::array<int, 4> counts{};
  std::array<int, 4> abstentions{};
  int winner = 0;
  int margin = 0;    // best count minus runner-up count
  bool tie = false;  // winner shared the best count (lowest index kept)
};

enum class DisambiguationMethod { kTriangulation, kMidpointSigns };

struct MidpointSigns {
  bool front0 = false;
  bool front1 = false;
  bool degenerate = false;  // parallel rays; counted as an abstention
};

struct TriangulationResult {
  bool front0 = false;
  bool front1 = false;
  bool degenerate = false;
  double depth0 = 0.0;
  double depth1 = 0.0;
  Vec3 midpoint = Vec3::Zero();
};

/// SVD decomposition of E into the four candidate poses.
FourPoseCandidates decompose_essential(const EssentialMatrix& essential);

/// Depth signs of the midpoint triangulation without forming the point.
MidpointSigns midpoint_signs(const RelativePose& pose, const BearingPair& pair);

/// Midpoint triangulation: solves for both depths and forms the 3D point
/// (view-0 frame), then checks the depth signs.
TriangulationResult triangulation_check(const RelativePose& pose, const BearingPair& pair);

/// Majority vote over the four candidates. Ties keep the lowest index and
/// are flagged. Throws AllAbstained when no pair produced a usable vote.
std::pair<RelativePose, CheiralityVote> disambiguate(const FourPoseCandidates& candidates,
                                                     const std::vector<BearingPair>& pairs,
                                                     DisambiguationMethod method);

struct TwoStepOptions {
  Variant variant = Variant::kQcqpZ;  // kQcqpZ or kQcqpZRedundant
  DisambiguationMethod method = DisambiguationMethod::kMidpointSigns;
  double eps_t = 1e-3;
  double rank_tol = 1e-5;
  SolverConfig solver;
};

/// Essential matrix extracted from the rank-1 e-block of a baseline solution.
EssentialMatrix essential_from_baseline(const Eigen::MatrixXd& x12);

/// Disambiguation stage of the two-step pipeline, given a solved relaxation.
PoseEstimate recover_two_step(const SdpSolution& solution, const std::vector<BearingPair>& pairs,
                              const TwoStepOptions& options);

/// Classic two-step baseline: solve the (E, t) relaxation, decompose into
/// four candidates, disambiguate by cheirality voting.
PoseEstimate solve_two_step(const std::vector<BearingPair>& pairs,
                            const TwoStepOptions& options = {});

}  // namespace relpose
