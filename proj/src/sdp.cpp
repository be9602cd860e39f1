#include "relpose/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <fstream>
#include <limits>

namespace relpose {

std::string solver_status_name(SolverStatus status) {
  switch (status) {
    case SolverStatus::kOptimal:
      return "Optimal";
    case SolverStatus::kMaxIterations:
      return "MaxIterations";
    case SolverStatus::kNumericalFailure:
      return "NumericalFailure";
  }
  return "unknown";
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInfinity = std::numeric_limits<double>::infinity();

double sym_inner(const MatrixXd& a, const MatrixXd& b) {
  return (a.array() * b.array()).sum();  // trace(ab) for symmetric a, b
}

void symmetrize(MatrixXd& m) { m = 0.5 * (m + m.transpose()).eval(); }

/// Largest alpha with m + alpha * dir still PSD, via the exact minimum
/// eigenvalue of L^-1 dir L^-T.
double step_to_boundary(const Eigen::LLT<MatrixXd>& llt, const MatrixXd& dir) {
  MatrixXd w = llt.matrixL().solve(dir);
  w = llt.matrixL().solve(w.transpose().eval());
  symmetrize(w);
  const double min_eig = Eigen::SelfAdjointEigenSolver<MatrixXd>(w, Eigen::EigenvaluesOnly)
                             .eigenvalues()(0);
  if (min_eig >= -1e-14) return kInfinity;
  return -1.0 / min_eig;
}

struct WorkingProblem {
  int dim;
  int m;
  MatrixXd cost;  // scaled
  double cost_scale;
  const std::vector<Constraint>* constraints;
  std::vector<MatrixXd> a_dense;
  VectorXd b;
  double b_scale;
  double c_scale;
};

struct Iterate {
  MatrixXd X, S;
  VectorXd y;
};

struct Residuals {
  VectorXd rp;   // b_i - <A_i, X>
  MatrixXd rd;   // C - sum y_i A_i - S
  double pinf = 0.0, dinf = 0.0, gap = 0.0, pobj = 0.0, dobj = 0.0;
};

Residuals compute_residuals(const WorkingProblem& wp, const Iterate& it) {
  Residuals r;
  r.rp.resize(wp.m);
  for (int i = 0; i < wp.m; ++i) {
    r.rp(i) = wp.b(i) - (*wp.constraints)[i].a.inner(it.X);
  }
  r.rd = wp.cost;
  for (int i = 0; i < wp.m; ++i) {
    (*wp.constraints)[i].a.add_scaled_to(r.rd, -it.y(i));
  }
  r.rd -= it.S;
  r.pinf = r.rp.cwiseAbs().maxCoeff();
  r.dinf = r.rd.norm();
  r.gap = sym_inner(it.X, it.S);
  r.pobj = sym_inner(wp.cost, it.X);
  r.dobj = wp.b.dot(it.y);
  return r;
}

bool converged(const WorkingProblem& wp, const Residuals& r, const SolverConfig& cfg) {
  return r.pinf <= cfg.feas_tol * (1.0 + wp.b_scale) &&
         r.dinf <= cfg.feas_tol * (1.0 + wp.c_scale) &&
         r.gap <= cfg.gap_tol * (1.0 + std::abs(r.pobj));
}

double convergence_score(const WorkingProblem& wp, const Residuals& r, const SolverConfig& cfg) {
  const double sp = r.pinf / (cfg.feas_tol * (1.0 + wp.b_scale));
  const double sd = r.dinf / (cfg.feas_tol * (1.0 + wp.c_scale));
  const double sg = r.gap / (cfg.gap_tol * (1.0 + std::abs(r.pobj)));
  return std::max(sg, std::max(sp, sd));
}

class TraceWriter {
 public:
  explicit TraceWriter(const std::string& path) {
    if (path.empty()) return;
    out_.open(path);
    if (out_.is_open()) {
      out_ << "iteration,gap,primal_infeas,dual_infeas,step_primal,step_dual,min_eig_x,min_eig_s\n";
    }
  }
  void row(int iter, const Residuals& r, double ap, double ad, const Iterate& it) {
    if (!out_.is_open()) return;
    const double min_x =
        Eigen::SelfAdjointEigenSolver<MatrixXd>(it.X, Eigen::EigenvaluesOnly).eigenvalues()(0);
    const double min_s =
        Eigen::SelfAdjointEigenSolver<MatrixXd>(it.S, Eigen::EigenvaluesOnly).eigenvalues()(0);
    out_.precision(17);
    out_ << iter << ',' << r.gap << ',' << r.pinf << ',' << r.dinf << ',' << ap << ',' << ad << ','
         << min_x << ',' << min_s << '\n';
  }

 private:
  std::ofstream out_;
};

}  // namespace

SdpSolution solve(const SdpProblem& problem, const SolverConfig& config) {
  const int d = problem.dim;
  const int m = static_cast<int>(problem.constraints.size());

  WorkingProblem wp;
  wp.dim = d;
  wp.m = m;
  wp.constraints = &problem.constraints;
  wp.b.resize(m);
  for (int i = 0; i < m; ++i) wp.b(i) = problem.constraints[i].b;
  wp.b_scale = m > 0 ? wp.b.cwiseAbs().maxCoeff() : 0.0;
  // Rescale large cost matrices (the epipolar cost grows with n) so the
  // working quantities stay near unit scale; duals are scaled back on exit.
  const double cost_max = problem.cost.cwiseAbs().maxCoeff();
  wp.cost_scale = cost_max > 10.0 ? cost_max : 1.0;
  wp.cost = problem.cost / wp.cost_scale;
  wp.c_scale = wp.cost.cwiseAbs().maxCoeff();
  wp.a_dense.reserve(m);
  for (int i = 0; i < m; ++i) wp.a_dense.push_back(problem.constraints[i].a.dense());

  const double tau = config.initial_scale * (1.0 + wp.b_scale);
  Iterate it{tau * MatrixXd::Identity(d, d), tau * MatrixXd::Identity(d, d), VectorXd::Zero(m)};

  TraceWriter trace(config.trace_path);

  auto finish = [&](const Iterate& final_it, int iterations, SolverStatus status) {
    Residuals r = compute_residuals(wp, final_it);
    SdpSolution sol;
    sol.X = final_it.X;
    sol.y = wp.cost_scale * final_it.y;
    sol.S = wp.cost_scale * final_it.S;
    sol.primal_objective = wp.cost_scale * r.pobj;
    sol.dual_objective = wp.cost_scale * r.dobj;
    sol.primal_infeasibility = r.pinf;
    sol.dual_infeasibility = wp.cost_scale * r.dinf;
    sol.relative_gap =
        wp.cost_scale * r.gap / (1.0 + std::abs(sol.primal_objective));
    sol.iterations = iterations;
    sol.status = status;
    return sol;
  };

  Iterate best = it;
  double best_score = kInfinity;

  const double ftb = config.step_fraction_to_boundary;
  int iter = 0;
  for (; iter < config.max_iterations; ++iter) {
    Residuals res = compute_residuals(wp, it);
    const double score = convergence_score(wp, res, config);
    if (score < best_score) {
      best_score = score;
      best = it;
    }
    if (converged(wp, res, config)) {
      return finish(it, iter, SolverStatus::kOptimal);
    }

    Eigen::LLT<MatrixXd> llt_s(it.S);
    Eigen::LLT<MatrixXd> llt_x(it.X);
    if (llt_s.info() != Eigen::Success || llt_x.info() != Eigen::Success) {
      return finish(best, iter, SolverStatus::kNumericalFailure);
    }
    const MatrixXd s_inv = llt_s.solve(MatrixXd::Identity(d, d));

    const double mu = res.gap / d;

    // Schur complement M(i,j) = trace(A_i X A_j S^-1); symmetric PD for
    // independent constraints.
    MatrixXd schur(m, m);
    std::vector<MatrixXd> t_j(m);
    for (int j = 0; j < m; ++j) {
      t_j[j] = it.X * wp.a_dense[j] * s_inv;
    }
    for (int i = 0; i < m; ++i) {
      for (int j = i; j < m; ++j) {
        const double v = problem.constraints[i].a.inner(t_j[j]);
        schur(i, j) = v;
        schur(j, i) = v;
      }
    }
    Eigen::LLT<MatrixXd> llt_m(schur);
    if (llt_m.info() != Eigen::Success) {
      // Redundant constraint sets make M singular; regularize once.
      schur.diagonal().array() += 1e-12 * (1.0 + schur.diagonal().maxCoeff());
      llt_m.compute(schur);
      if (llt_m.info() != Eigen::Success) {
        return finish(best, iter, SolverStatus::kNumericalFailure);
      }
    }

    const MatrixXd x_rd_sinv = it.X * res.rd * s_inv;
    VectorXd rhs_base(m);
    for (int i = 0; i < m; ++i) {
      rhs_base(i) = wp.b(i) + problem.constraints[i].a.inner(x_rd_sinv);
    }

    auto direction = [&](double sigma_mu, const MatrixXd* second_order, Iterate& delta) {
      VectorXd rhs = rhs_base;
      if (sigma_mu != 0.0) {
        for (int i = 0; i < m; ++i) {
          rhs(i) -= sigma_mu * problem.constraints[i].a.inner(s_inv);
        }
      }
      if (second_order != nullptr) {
        for (int i = 0; i < m; ++i) {
          rhs(i) += problem.constraints[i].a.inner(*second_order);
        }
      }
      delta.y = llt_m.solve(rhs);
      delta.S = res.rd;
      for (int i = 0; i < m; ++i) {
        (*wp.constraints)[i].a.add_scaled_to(delta.S, -delta.y(i));
      }
      MatrixXd z = -it.X - it.X * delta.S * s_inv;
      if (sigma_mu != 0.0) z += sigma_mu * s_inv;
      if (second_order != nullptr) z -= *second_order;
      symmetrize(z);
      delta.X = std::move(z);
    };

    // Predictor (affine scaling).
    Iterate aff;
    direction(0.0, nullptr, aff);
    const double ap_aff = std::min(1.0, ftb * step_to_boundary(llt_x, aff.X));
    const double ad_aff = std::min(1.0, ftb * step_to_boundary(llt_s, aff.S));
    double gap_aff = res.gap + ap_aff * sym_inner(aff.X, it.S) + ad_aff * sym_inner(it.X, aff.S) +
                     ap_aff * ad_aff * sym_inner(aff.X, aff.S);
    gap_aff = std::max(gap_aff, 0.0);
    double sigma = res.gap > 0.0 ? std::pow(gap_aff / res.gap, 3.0) : 0.0;
    sigma = std::min(1.0, std::max(0.0, sigma));

    // Corrector with Mehrotra second-order term.
    MatrixXd second_order = aff.X * aff.S * s_inv;
    Iterate delta;
    direction(sigma * mu, &second_order, delta);
    double ap = std::min(1.0, ftb * step_to_boundary(llt_x, delta.X));
    double ad = std::min(1.0, ftb * step_to_boundary(llt_s, delta.S));

    trace.row(iter, res, ap, ad, it);

    if (ap < 1e-12 && ad < 1e-12) {
      return finish(best, iter, SolverStatus::kMaxIterations);  // stalled
    }

    it.X += ap * delta.X;
    it.y += ad * delta.y;
    it.S += ad * delta.S;
    symmetrize(it.X);
    symmetrize(it.S);
  }

  Residuals res = compute_residuals(wp, it);
  if (convergence_score(wp, res, config) < best_score) best = it;
  return finish(best, iter, SolverStatus::kMaxIterations);
}

KktResiduals kkt_residuals(const SdpProblem& problem, const SdpSolution& solution) {
  KktResiduals r{};
  double pinf = 0.0;
  for (const Constraint& c : problem.constraints) {
    pinf = std::max(pinf, std::abs(c.a.inner(solution.X) - c.b));
  }
  r.primal_infeasibility = pinf;
  MatrixXd rd = problem.cost;
  for (size_t i = 0; i < problem.constraints.size(); ++i) {
    problem.constraints[i].a.add_scaled_to(rd, -solution.y(static_cast<int>(i)));
  }
  rd -= solution.S;
  r.dual_infeasibility = rd.norm();
  r.gap = (solution.X.array() * solution.S.array()).sum();
  return r;
}

}  // namespace relpose
