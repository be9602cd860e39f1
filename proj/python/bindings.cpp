#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "relpose/experiments.hpp"
#include "relpose/io.hpp"
#include "relpose/recovery.hpp"
#include "relpose/sdp.hpp"
#include "relpose/synthetic.hpp"
#include "relpose/twostep.hpp"

namespace py = pybind11;
using namespace relpose;

namespace {

std::vector<BearingPair> make_pairs(const Eigen::MatrixXd& f0, const Eigen::MatrixXd& f1,
                                    const std::vector<double>& weights) {
  if (f0.cols() != 3 || f1.cols() != 3 || f0.rows() != f1.rows()) {
    throw std::invalid_argument("expected two (n, 3) bearing arrays of equal length");
  }
  if (!weights.empty() && static_cast<Eigen::Index>(weights.size()) != f0.rows()) {
    throw std::invalid_argument("weights must match the number of correspondences");
  }
  std::vector<BearingPair> pairs;
  pairs.reserve(f0.rows());
  for (Eigen::Index i = 0; i < f0.rows(); ++i) {
    pairs.emplace_back(UnitVector3(f0.row(i).transpose()), UnitVector3(f1.row(i).transpose()),
                       weights.empty() ? 1.0 : weights[i]);
  }
  return pairs;
}

py::dict estimate_to_dict(const PoseEstimate& estimate) {
  py::dict out;
  out["E"] = estimate.essential.mat();
  out["R"] = estimate.pose.rotation.mat();
  out["t"] = estimate.pose.translation.vec();
  out["q"] = estimate.q.vec();
  out["s_t2"] = estimate.s_t_squared;
  out["certified"] = estimate.certified;
  out["is_pure_rot"] = estimate.is_pure_rotation;
  out["gap"] = estimate.solver_gap;
  out["eigenvalues"] = estimate.eigenvalue_report;
  out["solver_status"] = solver_status_name(estimate.solver_status);
  out["rank_report"] =
      py::make_tuple(estimate.certificate.rank_full_block, estimate.certificate.rank_e_block,
                     estimate.certificate.rank_tq_block);
  return out;
}

py::dict solve_dispatch(const Eigen::MatrixXd& f0, const Eigen::MatrixXd& f1,
                        const std::vector<double>& weights, const std::string& variant,
                        const std::string& method, double eps_t) {
  const std::vector<BearingPair> pairs = make_pairs(f0, f1, weights);
  if (variant == "c2p" || variant == "c2p-fast") {
    EstimatorOptions options;
    options.variant = variant == "c2p" ? Variant::kC2p : Variant::kC2pFast;
    options.eps_t = eps_t;
    return estimate_to_dict(solve_c2p(pairs, options));
  }
  if (variant == "two-step-z" || variant == "two-step-z-redundant") {
    TwoStepOptions options;
    options.variant = variant == "two-step-z" ? Variant::kQcqpZ : Variant::kQcqpZRedundant;
    options.method = method == "t" ? DisambiguationMethod::kTriangulation
                                   : DisambiguationMethod::kMidpointSigns;
    options.eps_t = eps_t;
    return estimate_to_dict(solve_two_step(pairs, options));
  }
  throw std::invalid_argument("unknown variant '" + variant + "'");
}

}  // namespace

PYBIND11_MODULE(relpose, m) {
  m.doc() = "Certifiably optimal relative pose from bearing correspondences";

  m.def("solve", &solve_dispatch, py::arg("f0"), py::arg("f1"),
        py::arg("weights") = std::vector<double>{}, py::arg("variant") = "c2p",
        py::arg("method") = "m", py::arg("eps_t") = 1e-3,
        "Estimate the relative pose from (n, 3) unit bearing arrays.");

  m.def(
      "generate_scene",
      [](int n, double noise_px, std::uint64_t seed, double magnitude, double focal_px) {
        SceneConfig config;
        config.n = n;
        config.noise_px = noise_px;
        config.seed = seed;
        config.focal_px = focal_px;
        if (magnitude >= 0.0) {
          config.magnitude_lo = config.magnitude_hi = magnitude;
        }
        const SyntheticInstance instance = generate_scene(config);
        Eigen::MatrixXd f0(n, 3), f1(n, 3);
        for (int i = 0; i < n; ++i) {
          f0.row(i) = instance.pairs[i].f0.vec().transpose();
          f1.row(i) = instance.pairs[i].f1.vec().transpose();
        }
        py::dict out;
        out["f0"] = f0;
        out["f1"] = f1;
        out["R"] = instance.ground_truth.rotation.mat();
        out["t"] = instance.ground_truth.translation.vec();
        out["magnitude"] = instance.translation_magnitude;
        return out;
      },
      py::arg("n"), py::arg("noise_px") = 0.0, py::arg("seed") = 0, py::arg("magnitude") = -1.0,
      py::arg("focal_px") = 800.0,
      "Generate a synthetic scene; magnitude < 0 samples the default (0, 2] range.");

  m.def(
      "pose_errors",
      [](const Mat3& r_true, const Vec3& t_true, const Mat3& r_est, const Vec3& t_est) {
        const auto [rot, trans] =
            pose_errors(RelativePose{RotationMatrix::from_matrix(r_true), UnitVector3(t_true)},
                        RelativePose{RotationMatrix::from_matrix(r_est), UnitVector3(t_est)});
        return py::make_tuple(rot, trans);
      },
      py::arg("R_true"), py::arg("t_true"), py::arg("R_est"), py::arg("t_est"),
      "Rotation and translation errors in degrees.");

  m.def(
      "decompose_essential",
      [](const Mat3& e) {
        const FourPoseCandidates candidates =
            decompose_essential(EssentialMatrix::from_matrix(e));
        py::list out;
        for (const RelativePose& pose : candidates.poses) {
          out.append(py::make_tuple(pose.rotation.mat(), pose.translation.vec()));
        }
        return out;
      },
      py::arg("E"), "The four (R, t) candidates sharing E's epipolar geometry.");

  m.def(
      "essential_from_pose",
      [](const Mat3& r, const Vec3& t) {
        return essential_from_pose(RelativePose{RotationMatrix::from_matrix(r), UnitVector3(t)})
            .mat();
      },
      py::arg("R"), py::arg("t"));

  m.def(
      "sdp_solve",
      [](const Eigen::MatrixXd& cost, const std::vector<std::pair<Eigen::MatrixXd, double>>& lmis) {
        SdpProblem problem;
        problem.dim = static_cast<int>(cost.rows());
        problem.cost = cost;
        for (const auto& [a, b] : lmis) {
          SparseSymMatrix sparse(problem.dim);
          for (int i = 0; i < a.rows(); ++i) {
            for (int j = i; j < a.cols(); ++j) {
              const double v = 0.5 * (a(i, j) + a(j, i));
              if (v != 0.0) sparse.add_term(i, j, i == j ? v : 2.0 * v);
            }
          }
          problem.constraints.push_back({sparse, b});
        }
        const SdpSolution solution = solve(problem);
        py::dict out;
        out["X"] = solution.X;
        out["y"] = solution.y;
        out["S"] = solution.S;
        out["primal_objective"] = solution.primal_objective;
        out["dual_objective"] = solution.dual_objective;
        out["relative_gap"] = solution.relative_gap;
        out["iterations"] = solution.iterations;
        out["status"] = solver_status_name(solution.status);
        return out;
      },
      py::arg("cost"), py::arg("constraints"),
      "Solve min trace(C0 X) s.t. trace(A_i X) = b_i, X >= 0 for dense symmetric (A_i, b_i).");

  py::register_exception<TooFewCorrespondences>(m, "TooFewCorrespondencesError",
                                                PyExc_ValueError);
  py::register_exception<DegenerateInput>(m, "DegenerateInputError", PyExc_ValueError);
}
