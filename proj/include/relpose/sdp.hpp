#pragma once

#include <string>
#include <vector>

#include "relpose/problem.hpp"
#include "relpose/types.hpp"

namespace relpose {

/// Standard-form semidefinite program:
///   min trace(C0 X)  s.t.  trace(A_i X) = b_i,  X >= 0.
struct SdpProblem {
  int dim = 0;
  Eigen::MatrixXd cost;
  std::vector<Constraint> constraints;

  static SdpProblem from_qcqp(const QcqpProblem& qcqp) {
    return SdpProblem{qcqp.layout.dim, qcqp.cost, qcqp.constraints};
  }
};

struct SolverConfig {
  double gap_tol = 1e-10;
  double feas_tol = 1e-9;
  int max_iterations = 100;
  double step_fraction_to_boundary = 0.98;
  double initial_scale = 1.0;
  /// When nonempty, a per-iteration CSV trace is written to this path.
  std::string trace_path;
};

enum class SolverStatus { kOptimal, kMaxIterations, kNumericalFailure };

std::string solver_status_name(SolverStatus status);

struct SdpSolution {
  Eigen::MatrixXd X;  // primal matrix
  Eigen::VectorXd y;  // dual multipliers
  Eigen::MatrixXd S;  // dual slack
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double relative_gap = 0.0;  // trace(XS) / (1 + |primal_objective|)
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
  SolverStatus status = SolverStatus::kNumericalFailure;
};

struct KktResiduals {
  double primal_infeasibility;  // max_i |trace(A_i X) - b_i|
  double dual_infeasibility;    // ||C0 - sum_i y_i A_i - S||_F
  double gap;                   // trace(X S)
};

/// Primal-dual interior-point solve (HKM direction, Mehrotra
/// predictor-corrector). Intended for small dense problems (d <= 32,
/// m <= 64). Deterministic: identical input gives bit-identical output.
SdpSolution solve(const SdpProblem& problem, const SolverConfig& config = {});

KktResiduals kkt_residuals(const SdpProblem& problem, const SdpSolution& solution);

}  // namespace relpose
