#include "sflow/gapmetric.hpp"

#include <cmath>

namespace sflow {

namespace {

void require_same_dim(const SymMatrix& a, const SymMatrix& b, const char* who) {
  if (a.dim() != b.dim())
    throw InvalidInput(std::string(who) + ": dimension mismatch (" + std::to_string(a.dim()) + " vs " +
                       std::to_string(b.dim()) + ")");
}

}  // namespace

GraphProjection graph_projection(const SymMatrix& m) {
  const Eigen::Index n = m.dim();
  Matrix g(2 * n, n);
  g.topRows(n).setIdentity();
  g.bottomRows(n) = m.matrix();
  // G^T G = I + M^2 is symmetric positive definite.
  const Matrix gram = Matrix::Identity(n, n) + m.matrix() * m.matrix();
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success) throw NumericalFailure("graph_projection: Cholesky of I + M^2 failed");
  Matrix p = g * llt.solve(g.transpose());
  p = 0.5 * (p + p.transpose());
  return {n, std::move(p)};
}

double gap_distance(const SymMatrix& t, const SymMatrix& s) {
  require_same_dim(t, s, "gap_distance");
  // The difference is symmetric; its norm is the largest |eigenvalue|, and the
  // Jacobi iteration on -D mirrors the one on D exactly.
  const SymMatrix d(Matrix(graph_projection(t).proj - graph_projection(s).proj));
  return sym_eig(d).values.cwiseAbs().maxCoeff();
}

double gap_delta(const SymMatrix& t, const SymMatrix& s) {
  require_same_dim(t, s, "gap_delta");
  const Matrix pt = graph_projection(t).proj;
  const Matrix ps = graph_projection(s).proj;
  const Matrix comp = Matrix::Identity(ps.rows(), ps.cols()) - ps;
  return operator_norm(comp * pt);
}

PerturbationCheck perturbation_inequality_check(const SymMatrix& t, const SymMatrix& s, const SymMatrix& a,
                                                const SymMatrix& b) {
  require_same_dim(t, s, "perturbation_inequality_check");
  require_same_dim(t, a, "perturbation_inequality_check");
  require_same_dim(t, b, "perturbation_inequality_check");
  const double na = operator_norm(a.matrix());
  const double nb = operator_norm(b.matrix());
  PerturbationCheck c;
  c.lhs = gap_distance(t + a, s + b);
  c.rhs = 2.0 * std::sqrt(2.0) * std::sqrt(1.0 + na * na) * std::sqrt(1.0 + nb * nb) *
          (gap_distance(t, s) + operator_norm((a - b).matrix()));
  c.slack = c.rhs - c.lhs;
  c.holds = c.lhs <= c.rhs + 1e-9;
  return c;
}

}  // namespace sflow
