#include "sflow/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace sflow {

namespace {

constexpr int kMaxSweeps = 100;

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw InvalidInput(std::string(what) + ": non-finite entries");
}

}  // namespace

SymMatrix::SymMatrix(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw InvalidInput("SymMatrix: expected a non-empty square matrix, got " +
                       std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::zero(Eigen::Index dim) { return SymMatrix(Matrix::Zero(dim, dim)); }
SymMatrix SymMatrix::identity(Eigen::Index dim) { return SymMatrix(Matrix::Identity(dim, dim)); }
SymMatrix SymMatrix::diagonal(const Vector& d) { return SymMatrix(Matrix(d.asDiagonal())); }

SymMatrix SymMatrix::operator+(const SymMatrix& o) const { return SymMatrix(m_ + o.m_); }
SymMatrix SymMatrix::operator-(const SymMatrix& o) const { return SymMatrix(m_ - o.m_); }
SymMatrix SymMatrix::operator-() const { return SymMatrix(Matrix(-m_)); }
SymMatrix SymMatrix::operator*(double s) const { return SymMatrix(Matrix(s * m_)); }

EigDecomp sym_eig(const SymMatrix& sym) {
  require_finite(sym.matrix(), "sym_eig");
  const Eigen::Index n = sym.dim();
  Matrix a = sym.matrix();
  Matrix v = Matrix::Identity(n, n);

  const double fro = a.norm();
  bool converged = (fro == 0.0);
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(2.0 * off) <= 1e-15 * fro) {
      converged = true;
      break;
    }
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Skip rotations that cannot change either diagonal entry.
        if (sweep > 3 && std::abs(apq) <= 1e-18 * (std::abs(a(p, p)) + std::abs(a(q, q))) ) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (!converged) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(2.0 * off) > 1e-13 * fro)
      throw NumericalFailure("sym_eig: Jacobi iteration did not converge");
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });
  EigDecomp out{Vector(n), Matrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = a(order[k], order[k]);
    out.vectors.col(k) = v.col(order[k]);
  }
  return out;
}

double scale_of(const EigDecomp& e) {
  return std::max(1.0, e.values.cwiseAbs().maxCoeff());
}

double scale_of(const SymMatrix& m) { return scale_of(sym_eig(m)); }

Matrix kernel_basis(const SymMatrix& m, double tol_rank) {
  if (!(tol_rank > 0.0)) throw InvalidInput("kernel_basis: tol_rank must be positive");
  const EigDecomp e = sym_eig(m);
  const double thr = tol_rank * scale_of(e);
  std::vector<Eigen::Index> cols;
  for (Eigen::Index k = 0; k < e.values.size(); ++k)
    if (std::abs(e.values(k)) <= thr) cols.push_back(k);
  Matrix out(m.dim(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = e.vectors.col(cols[j]);
  return out;
}

Vector singular_values(const Matrix& m) {
  require_finite(m, "singular_values");
  if (m.size() == 0) return Vector();
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues();
}

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return singular_values(m)(0);
}

QuadFormIndex quadform_index(const SymMatrix& q, double tol_rank) {
  if (!(tol_rank > 0.0)) throw InvalidInput("quadform_index: tol_rank must be positive");
  const EigDecomp e = sym_eig(q);
  const double thr = tol_rank * scale_of(e);
  QuadFormIndex idx;
  for (Eigen::Index k = 0; k < e.values.size(); ++k) {
    const double v = e.values(k);
    if (v < -thr)
      ++idx.negative;
    else if (v > thr)
      ++idx.positive;
    else
      ++idx.null;
  }
  return idx;
}

ThinQR thin_qr(const Matrix& frame, double tol_rank) {
  if (!(tol_rank > 0.0)) throw InvalidInput("orthonormalize: tol_rank must be positive");
  if (frame.cols() > frame.rows())
    throw InvalidInput("orthonormalize: more columns than rows");
  if (frame.cols() == 0) return {Matrix(frame.rows(), 0), Matrix(0, 0)};
  const Vector sv = singular_values(frame);
  const double scale = std::max(1.0, sv(0));
  if (sv(sv.size() - 1) <= tol_rank * scale)
    throw InvalidInput("orthonormalize: columns are numerically dependent");

  Eigen::HouseholderQR<Matrix> qr(frame);
  const Eigen::Index k = frame.cols();
  Matrix q = qr.householderQ() * Matrix::Identity(frame.rows(), k);
  Matrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  // Positive diagonal of R makes the factorization unique.
  for (Eigen::Index j = 0; j < k; ++j) {
    if (r(j, j) < 0.0) {
      q.col(j) *= -1.0;
      r.row(j) *= -1.0;
    }
  }
  return {std::move(q), std::move(r)};
}

Matrix orthonormalize(const Matrix& frame, double tol_rank) { return thin_qr(frame, tol_rank).q; }

}  // namespace sflow
