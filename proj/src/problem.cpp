#include "relpose/problem.hpp"

#include <algorithm>

namespace relpose {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::kC2p:
      return "c2p";
    case Variant::kC2pFast:
      return "c2p-fast";
    case Variant::kQcqpZ:
      return "two-step-z";
    case Variant::kQcqpZRedundant:
      return "two-step-z-redundant";
  }
  return "unknown";
}

void SparseSymMatrix::add_term(int i, int j, double c) {
  if (i > j) std::swap(i, j);
  const double value = (i == j) ? c : 0.5 * c;
  entries_[find_or_insert(i, j)].value += value;
}

int SparseSymMatrix::find_or_insert(int i, int j) {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair<int, int>{i, j},
                             [](const Entry& e, const std::pair<int, int>& key) {
                               return std::pair<int, int>{e.i, e.j} < key;
                             });
  if (it != entries_.end() && it->i == i && it->j == j) {
    return static_cast<int>(it - entries_.begin());
  }
  return static_cast<int>(entries_.insert(it, Entry{i, j, 0.0}) - entries_.begin());
}

double SparseSymMatrix::eval(const Eigen::VectorXd& x) const {
  double acc = 0.0;
  for (const Entry& e : entries_) {
    acc += (e.i == e.j) ? e.value * x(e.i) * x(e.i) : 2.0 * e.value * x(e.i) * x(e.j);
  }
  return acc;
}

double SparseSymMatrix::inner(const Eigen::MatrixXd& big_x) const {
  // trace(A X); exact for non-symmetric X too.
  double acc = 0.0;
  for (const Entry& e : entries_) {
    acc += (e.i == e.j) ? e.value * big_x(e.i, e.i)
                        : e.value * (big_x(e.i, e.j) + big_x(e.j, e.i));
  }
  return acc;
}

Eigen::MatrixXd SparseSymMatrix::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim_, dim_);
  add_scaled_to(m, 1.0);
  return m;
}

void SparseSymMatrix::add_scaled_to(Eigen::MatrixXd& m, double scale) const {
  for (const Entry& e : entries_) {
    m(e.i, e.j) += scale * e.value;
    if (e.i != e.j) m(e.j, e.i) += scale * e.value;
  }
}

Mat3 AveragedCoefficients::mean_f0_f1t() const {
  // rot9 stores mean(f1 f0^T) row-major, so transpose while reshaping.
  Mat3 m;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      m(b, a) = rot9(3 * a + b);
    }
  }
  return m;
}

Eigen::MatrixXd build_cost(const std::vector<BearingPair>& pairs) {
  if (pairs.empty()) {
    throw EmptyInput("cannot build a cost matrix from zero correspondences");
  }
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(9, 9);
  Vec9 k;
  for (const BearingPair& pair : pairs) {
    const Vec3& f0 = pair.f0.vec();
    const Vec3& f1 = pair.f1.vec();
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        k(3 * a + b) = f0(a) * f1(b);  // Kronecker product f0 (x) f1
      }
    }
    cost.selfadjointView<Eigen::Lower>().rankUpdate(k, pair.weight);
  }
  return cost.selfadjointView<Eigen::Lower>();
}

AveragedCoefficients average_coefficients(const std::vector<BearingPair>& pairs) {
  if (pairs.empty()) {
    throw EmptyInput("cannot average coefficients of zero correspondences");
  }
  Mat3 f1_f0t = Mat3::Zero();
  Vec3 sum_f0 = Vec3::Zero(), sum_f1 = Vec3::Zero();
  for (const BearingPair& pair : pairs) {
    f1_f0t += pair.f1.vec() * pair.f0.vec().transpose();
    sum_f0 += pair.f0.vec();
    sum_f1 += pair.f1.vec();
  }
  const double inv_n = 1.0 / static_cast<double>(pairs.size());
  AveragedCoefficients avg;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      avg.rot9(3 * a + b) = inv_n * f1_f0t(a, b);
    }
  }
  avg.t3 = inv_n * sum_f0;
  avg.q3 = -inv_n * sum_f1;
  return avg;
}

std::vector<Constraint> build_manifold_constraints(const ParamLayout& layout) {
  std::vector<Constraint> constraints;
  constraints.reserve(12);

  // trace(EE^T) = 2
  SparseSymMatrix trace_e(layout.dim);
  for (int k = 0; k < 9; ++k) trace_e.add_term(k, k, 1.0);
  constraints.push_back({trace_e, 2.0});

  // Adj(E)(i,j) - q_i t_j = 0, row-major over (i, j)
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      SparseSymMatrix a(layout.dim);
      const int r1 = (j + 1) % 3, r2 = (j + 2) % 3;
      const int c1 = (i + 1) % 3, c2 = (i + 2) % 3;
      a.add_term(layout.e(r1, c1), layout.e(r2, c2), 1.0);
      a.add_term(layout.e(r1, c2), layout.e(r2, c1), -1.0);
      a.add_term(layout.q(i), layout.t(j), -1.0);
      constraints.push_back({a, 0.0});
    }
  }

  // |t|^2 = 1, |q|^2 = 1
  SparseSymMatrix t_norm(layout.dim);
  SparseSymMatrix q_norm(layout.dim);
  for (int k = 0; k < 3; ++k) {
    t_norm.add_term(layout.t(k), layout.t(k), 1.0);
    q_norm.add_term(layout.q(k), layout.q(k), 1.0);
  }
  constraints.push_back({t_norm, 1.0});
  constraints.push_back({q_norm, 1.0});
  return constraints;
}

std::vector<Constraint> build_cheirality_constraints(const ParamLayout& layout,
                                                     const AveragedCoefficients& avg) {
  std::vector<Constraint> constraints;
  constraints.reserve(3);

  // mean(f1^T E^T [t]x f0) - s_r^2 = 0. The bilinear (e, t) coefficients
  // follow from trace(E^T [t]x M) with M = mean(f0 f1^T): the coefficient of
  // E(r,c) t_k is (G_k M)(r,c) with G_k the skew generator of axis k.
  const Mat3 m = avg.mean_f0_f1t();
  SparseSymMatrix rot(layout.dim);
  for (int k = 0; k < 3; ++k) {
    const Mat3 gk_m = skew(Vec3::Unit(k)) * m;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        if (gk_m(r, c) != 0.0) rot.add_term(layout.e(r, c), layout.t(k), gk_m(r, c));
      }
    }
  }
  rot.add_term(layout.s_r(), layout.s_r(), -1.0);
  constraints.push_back({rot, 0.0});

  // h mean(f0)^T t - h mean(f1)^T q - s_t^2 = 0
  SparseSymMatrix trans(layout.dim);
  for (int k = 0; k < 3; ++k) {
    trans.add_term(layout.h(), layout.t(k), avg.t3(k));
    trans.add_term(layout.h(), layout.q(k), avg.q3(k));
  }
  trans.add_term(layout.s_t(), layout.s_t(), -1.0);
  constraints.push_back({trans, 0.0});

  // h^2 = 1
  SparseSymMatrix homog(layout.dim);
  homog.add_term(layout.h(), layout.h(), 1.0);
  constraints.push_back({homog, 1.0});
  return constraints;
}

namespace {

// (E E^T)(i,j) [+ t_i t_j = delta_ij] as a constraint over the given layout.
Constraint gram_left(const ParamLayout& layout, int i, int j) {
  SparseSymMatrix a(layout.dim);
  for (int k = 0; k < 3; ++k) a.add_term(layout.e(i, k), layout.e(j, k), 1.0);
  a.add_term(layout.t(i), layout.t(j), 1.0);
  return {a, i == j ? 1.0 : 0.0};
}

Constraint gram_right(const ParamLayout& layout, int i, int j) {
  SparseSymMatrix a(layout.dim);
  for (int k = 0; k < 3; ++k) a.add_term(layout.e(k, i), layout.e(k, j), 1.0);
  a.add_term(layout.q(i), layout.q(j), 1.0);
  return {a, i == j ? 1.0 : 0.0};
}

}  // namespace

std::vector<Constraint> build_redundant_constraints(const ParamLayout& layout) {
  std::vector<Constraint> constraints;
  constraints.reserve(12);
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) constraints.push_back(gram_left(layout, i, j));
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) constraints.push_back(gram_right(layout, i, j));
  }
  return constraints;
}

namespace {

std::vector<Constraint> build_z_constraints(const ParamLayout& layout, bool redundant) {
  std::vector<Constraint> constraints;
  // E E^T = [t]x [t]x^T upper triangle, identity part on the right-hand side.
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) constraints.push_back(gram_left(layout, i, j));
  }
  SparseSymMatrix t_norm(layout.dim);
  for (int k = 0; k < 3; ++k) t_norm.add_term(layout.t(k), layout.t(k), 1.0);
  constraints.push_back({t_norm, 1.0});

  if (redundant) {
    // Homogenized diagonal form (E E^T)(i,i) + t_i^2 - t^T t = 0 and the
    // left-nullspace identity E^T t = 0; both expressible in (e, t) alone.
    for (int i = 0; i < 3; ++i) {
      SparseSymMatrix a(layout.dim);
      for (int k = 0; k < 3; ++k) a.add_term(layout.e(i, k), layout.e(i, k), 1.0);
      a.add_term(layout.t(i), layout.t(i), 1.0);
      for (int k = 0; k < 3; ++k) a.add_term(layout.t(k), layout.t(k), -1.0);
      constraints.push_back({a, 0.0});
    }
    for (int c = 0; c < 3; ++c) {
      SparseSymMatrix a(layout.dim);
      for (int r = 0; r < 3; ++r) a.add_term(layout.e(r, c), layout.t(r), 1.0);
      constraints.push_back({a, 0.0});
    }
  }
  return constraints;
}

}  // namespace

QcqpProblem build_qcqp(const std::vector<BearingPair>& pairs, Variant variant) {
  if (pairs.size() < 6) {
    throw TooFewCorrespondences("the non-minimal formulation needs at least 6 correspondences, got " +
                                std::to_string(pairs.size()));
  }
  QcqpProblem problem;
  problem.variant = variant;
  problem.layout = (variant == Variant::kC2p || variant == Variant::kC2pFast)
                       ? ParamLayout::full()
                       : ParamLayout::z();
  problem.cost = Eigen::MatrixXd::Zero(problem.layout.dim, problem.layout.dim);
  problem.cost.topLeftCorner<9, 9>() = build_cost(pairs);

  switch (variant) {
    case Variant::kC2p:
    case Variant::kC2pFast: {
      problem.constraints = build_manifold_constraints(problem.layout);
      const auto cheirality = build_cheirality_constraints(problem.layout, average_coefficients(pairs));
      problem.constraints.insert(problem.constraints.end(), cheirality.begin(), cheirality.end());
      if (variant == Variant::kC2p) {
        const auto redundant = build_redundant_constraints(problem.layout);
        problem.constraints.insert(problem.constraints.end(), redundant.begin(), redundant.end());
      }
      break;
    }
    case Variant::kQcqpZ:
      problem.constraints = build_z_constraints(problem.layout, false);
      break;
    case Variant::kQcqpZRedundant:
      problem.constraints = build_z_constraints(problem.layout, true);
      break;
  }
  return problem;
}

}  // namespace relpose
