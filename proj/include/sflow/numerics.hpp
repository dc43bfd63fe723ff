#pragma once

// Dense symmetric linear algebra shared by every other module.

#include <Eigen/Dense>

#include "sflow/errors.hpp"

namespace sflow {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Numerical thresholds. All rank-type decisions are scale relative:
/// a value counts as zero when |x| <= tol * max(1, ||M||).
struct Tolerances {
  double tol_rank = 1e-9;
  double tol_orth = 1e-10;
  double tol_eig = 1e-11;
  double lambda_res = 1e-10;
};

/// Real symmetric matrix. Symmetry is exact: the input is replaced by
/// (M + M^T) / 2 at construction.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& m);

  static SymMatrix zero(Eigen::Index dim);
  static SymMatrix identity(Eigen::Index dim);
  static SymMatrix diagonal(const Vector& d);

  Eigen::Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  SymMatrix operator+(const SymMatrix& o) const;
  SymMatrix operator-(const SymMatrix& o) const;
  SymMatrix operator-() const;
  SymMatrix operator*(double s) const;
  friend SymMatrix operator*(double s, const SymMatrix& m) { return m * s; }

 private:
  Matrix m_;
};

struct EigDecomp {
  Vector values;   // ascending
  Matrix vectors;  // column k pairs with values[k]
};

/// Morse index, signature and degeneracy of a quadratic form.
struct QuadFormIndex {
  int negative = 0;
  int positive = 0;
  int null = 0;

  int morse_index() const { return negative; }
  int signature() const { return positive - negative; }
  bool degenerate() const { return null > 0; }
};

/// Cyclic Jacobi eigendecomposition. Rotations are applied in a fixed
/// row-major sweep order so identical input bits give identical output.
EigDecomp sym_eig(const SymMatrix& m);

/// max(1, ||M||), the reference magnitude for relative thresholds.
double scale_of(const SymMatrix& m);
double scale_of(const EigDecomp& e);

/// Orthonormal frame of the eigenvectors with |eigenvalue| <= tol * scale.
/// May have zero columns.
Matrix kernel_basis(const SymMatrix& m, double tol_rank = Tolerances{}.tol_rank);

/// Largest singular value.
double operator_norm(const Matrix& m);

/// Singular values in descending order.
Vector singular_values(const Matrix& m);

QuadFormIndex quadform_index(const SymMatrix& q, double tol_rank = Tolerances{}.tol_rank);

/// Orthonormal frame with the same column span. Throws InvalidInput when
/// the smallest singular value is below tol * scale.
Matrix orthonormalize(const Matrix& frame, double tol_rank = Tolerances{}.tol_rank);

/// Thin QR with the same rank check as orthonormalize: frame = q * r.
struct ThinQR {
  Matrix q;
  Matrix r;
};
ThinQR thin_qr(const Matrix& frame, double tol_rank = Tolerances{}.tol_rank);

/// Applies f to every eigenvalue: V f(D) V^T.
template <class F>
SymMatrix spectral_map(const EigDecomp& e, F&& f) {
  Vector mapped = e.values.unaryExpr(f);
  return SymMatrix(e.vectors * mapped.asDiagonal() * e.vectors.transpose());
}

}  // namespace sflow
