#pragma once

// Lagrangian subspaces of R^{2n} and the crossing-form Maslov index.
//
// Conventions: J = [[0, -I], [I, 0]], omega(u, v) = <J u, v>. A subspace L
// is Lagrangian when J L is its orthogonal complement. At a crossing
// lambda* of a path Lambda against L0 the complement J Lambda(lambda*) is
// used to write Lambda(lambda) = {u + phi(u)}, and the crossing form is
// Q[u] = d/dlambda omega(u, phi(u)) on Lambda(lambda*) ∩ L0. The index is
// -m^-(Q) at lambda = 0, the signature in the interior and m^-(-Q) at 1.

#include <functional>
#include <vector>

#include "sflow/numerics.hpp"
#include "sflow/specflow.hpp"

namespace sflow {

/// Standard symplectic matrix of size 2n.
Matrix symplectic_j(Eigen::Index n);

/// Orthonormal frame (2n x n) of a Lagrangian subspace.
class LagrangianFrame {
 public:
  /// Orthonormalizes `frame` and checks the Lagrangian condition against
  /// `j` (standard J when empty). Throws InvalidInput otherwise.
  explicit LagrangianFrame(const Matrix& frame, double tol = Tolerances{}.tol_orth, const Matrix& j = {});

  Eigen::Index n() const { return frame_.cols(); }
  const Matrix& frame() const { return frame_; }
  Matrix projection() const { return frame_ * frame_.transpose(); }

 private:
  Matrix frame_;
};

bool is_lagrangian(const Matrix& frame, double tol = Tolerances{}.tol_orth, const Matrix& j = {});

/// dim(L1 ∩ L2): singular values of L1^T L2 with cos >= 1 - tol.
int intersection_dim(const LagrangianFrame& l1, const LagrangianFrame& l2, double tol = Tolerances{}.tol_rank);

/// Principal angles (radians, ascending) between two frames of equal rank.
Vector principal_angles(const Matrix& f1, const Matrix& f2);

/// Span of the graph {(u, T u)}.
LagrangianFrame graph_lagrangian(const SymMatrix& t);

/// The horizontal Lagrangian R^n x {0}.
LagrangianFrame horizontal_lagrangian(Eigen::Index n);

class LagrangianPath {
 public:
  using Eval = std::function<Matrix(double)>;  // any frame spanning Lambda(lambda)

  LagrangianPath(Eigen::Index n, Eval eval, int smoothness_hint = 64);

  Eigen::Index n() const { return n_; }
  int smoothness_hint() const { return hint_; }
  /// Orthonormal frame of Lambda(lambda).
  Matrix eval(double lambda) const;

 private:
  Eigen::Index n_;
  Eval eval_;
  int hint_;
};

LagrangianPath constant_lagrangian_path(const LagrangianFrame& l);
LagrangianPath concatenate(const LagrangianPath& p1, const LagrangianPath& p2);
LagrangianPath restrict_path(const LagrangianPath& p, double lo, double hi);
LagrangianPath reverse(const LagrangianPath& p);

struct MaslovReport {
  int value = 0;
  std::vector<CrossingRecord> crossings;  // kernel = basis of Lambda(lambda*) ∩ L0 in R^{2n}
  int evaluations = 0;
};

struct MaslovOptions {
  Tolerances tol;
  int scan_samples = 512;
  double fd_step = 1e-6;  // half-width of the finite-difference window for phi
};

MaslovReport maslov_index(const LagrangianPath& path, const LagrangianFrame& l0, const MaslovOptions& opts = {});

/// Maslov index of a pair, computed as the single path Lambda1 x Lambda2 in
/// (R^{4n}, omega ⊕ -omega) against the diagonal. Crossing forms are
/// Q1 - Q2 on Lambda1 ∩ Lambda2.
MaslovReport maslov_pair_index(const LagrangianPath& p1, const LagrangianPath& p2, const MaslovOptions& opts = {});

/// Maslov index of lambda -> gra(A(lambda)) against the horizontal.
int sfl_via_maslov(const OperatorPath& path, const MaslovOptions& opts = {});
MaslovReport graph_maslov_report(const OperatorPath& path, const MaslovOptions& opts = {});

/// General entry point with an explicit symplectic matrix (J^2 = -I,
/// J^T = -J) on R^{2m}; frames are 2m x m.
MaslovReport maslov_index_general(const LagrangianPath& path, const Matrix& l0, const Matrix& j,
                                  const MaslovOptions& opts);

/// Principal angles between Lambda(lambda) and L0 sampled on a grid.
struct AngleTrajectory {
  std::vector<double> lambdas;
  std::vector<Vector> angles;
};
AngleTrajectory angle_trajectory(const LagrangianPath& path, const LagrangianFrame& l0, int samples);

}  // namespace sflow
