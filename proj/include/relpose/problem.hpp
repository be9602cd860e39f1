#pragma once

#include <string>
#include <vector>

#include "relpose/geometry.hpp"
#include "relpose/types.hpp"

namespace relpose {

/// Problem flavors. kC2p / kC2pFast estimate (E, t, q, h, s_r, s_t) with the
/// cheirality constraints baked in; the Z variants are the classic two-step
/// baseline over (E, t) that needs posterior disambiguation.
enum class Variant { kC2p, kC2pFast, kQcqpZ, kQcqpZRedundant };

std::string variant_name(Variant v);

/// Index map into the lifted parameter vector x.
///
/// Full layout (d = 18):  x = [e(9), t(3), q(3), h, s_r, s_t]
/// Z layout (d = 12):     x = [e(9), t(3)]
/// e stacks the rows of E, so e[3r + c] = E(r, c).
struct ParamLayout {
  int dim = 18;
  bool has_q = true;  // false for the Z layouts

  static ParamLayout full() { return ParamLayout{18, true}; }
  static ParamLayout z() { return ParamLayout{12, false}; }

  int e(int r, int c) const { return 3 * r + c; }
  int t(int k) const { return 9 + k; }
  int q(int k) const { return 12 + k; }
  int h() const { return 15; }
  int s_r() const { return 16; }
  int s_t() const { return 17; }
};

/// Symmetric matrix stored as upper-triangle (i <= j) index/value triplets.
/// Values are matrix entries: a bilinear term c * x_i * x_j (i != j) is
/// stored as c/2 at (i, j) so that x^T A x and trace(A X) come out right
/// with a symmetric A.
class SparseSymMatrix {
 public:
  struct Entry {
    int i, j;
    double value;
  };

  explicit SparseSymMatrix(int dim) : dim_(dim) {}

  /// Adds the quadratic-form term c * x_i * x_j (order of i, j irrelevant).
  void add_term(int i, int j, double c);

  double eval(const Eigen::VectorXd& x) const;        // x^T A x
  double inner(const Eigen::MatrixXd& big_x) const;   // trace(A X)
  Eigen::MatrixXd dense() const;
  void add_scaled_to(Eigen::MatrixXd& m, double scale) const;  // m += scale * A

  int dim() const { return dim_; }
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  int find_or_insert(int i, int j);
  int dim_;
  std::vector<Entry> entries_;  // sorted by (i, j), unique
};

/// One standard-form constraint x^T A x = b.
struct Constraint {
  SparseSymMatrix a;
  double b;
};

/// Data-dependent scalar coefficients averaged over all correspondences
/// (the barred bearings of the disambiguation constraints).
struct AveragedCoefficients {
  Vec9 rot9;  // vec of mean(f1 f0^T), row-major: rot9[3a+b] = mean(f1[a] f0[b])
  Vec3 t3;    // mean(f0)
  Vec3 q3;    // -mean(f1)

  /// mean(f0 f1^T) reassembled from rot9.
  Mat3 mean_f0_f1t() const;
};

/// Assembled lifted problem: min x^T C0 x  s.t.  x^T A_i x = b_i.
struct QcqpProblem {
  Variant variant;
  ParamLayout layout;
  Eigen::MatrixXd cost;  // d x d, only the 9x9 e-block is nonzero
  std::vector<Constraint> constraints;
};

/// C = sum_i w_i k_i k_i^T with k_i = f0_i (x) f1_i (Kronecker product).
/// For any E, e^T C e equals the weighted sum of squared epipolar residuals.
Eigen::MatrixXd build_cost(const std::vector<BearingPair>& pairs);

AveragedCoefficients average_coefficients(const std::vector<BearingPair>& pairs);

/// 12 constraints of the essential-manifold characterization:
/// trace(EE^T) = 2, Adj(E) = q t^T (9 equations), |t|^2 = 1, |q|^2 = 1.
std::vector<Constraint> build_manifold_constraints(const ParamLayout& layout);

/// 3 disambiguation constraints: the rotation test minus s_r^2, the
/// translation test (homogenized by h) minus s_t^2, and h^2 = 1.
std::vector<Constraint> build_cheirality_constraints(const ParamLayout& layout,
                                                     const AveragedCoefficients& avg);

/// 12 redundant constraints: upper triangles of EE^T = [t]x [t]x^T and
/// E^T E = [q]x [q]x^T, with the identity part moved to the right-hand side
/// (diagonal entries have b = 1).
std::vector<Constraint> build_redundant_constraints(const ParamLayout& layout);

/// Full problem assembly for a variant. Requires at least 6 correspondences.
QcqpProblem build_qcqp(const std::vector<BearingPair>& pairs, Variant variant);

}  // namespace relpose
