#include "sflow/maslov.hpp"

#include <algorithm>
#include <cmath>

#include "sflow/detail/crossing_scan.hpp"

namespace sflow {

Matrix symplectic_j(Eigen::Index n) {
  Matrix j = Matrix::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n) = -Matrix::Identity(n, n);
  j.bottomLeftCorner(n, n) = Matrix::Identity(n, n);
  return j;
}

bool is_lagrangian(const Matrix& frame, double tol, const Matrix& j) {
  const Eigen::Index m = frame.cols();
  if (frame.rows() != 2 * m || m == 0) return false;
  const Matrix jm = j.size() == 0 ? symplectic_j(m) : j;
  if (jm.rows() != frame.rows()) return false;
  const double orth = (frame.transpose() * frame - Matrix::Identity(m, m)).cwiseAbs().maxCoeff();
  const double omega = (frame.transpose() * jm * frame).cwiseAbs().maxCoeff();
  return orth <= tol && omega <= tol;
}

LagrangianFrame::LagrangianFrame(const Matrix& frame, double tol, const Matrix& j) {
  if (frame.cols() == 0 || frame.rows() != 2 * frame.cols())
    throw InvalidInput("LagrangianFrame: expected a 2n x n frame");
  frame_ = orthonormalize(frame);
  if (!is_lagrangian(frame_, tol, j)) throw InvalidInput("LagrangianFrame: subspace is not Lagrangian");
}

Vector principal_angles(const Matrix& f1, const Matrix& f2) {
  Vector c = singular_values(f1.transpose() * f2);
  Vector out(c.size());
  for (Eigen::Index k = 0; k < c.size(); ++k) out(k) = std::acos(std::clamp(c(k), -1.0, 1.0));
  return out;  // cosines are descending, so angles ascend
}

int intersection_dim(const LagrangianFrame& l1, const LagrangianFrame& l2, double tol) {
  if (l1.n() != l2.n()) throw InvalidInput("intersection_dim: dimension mismatch");
  const Vector c = singular_values(l1.frame().transpose() * l2.frame());
  int k = 0;
  for (Eigen::Index i = 0; i < c.size(); ++i)
    if (c(i) >= 1.0 - tol) ++k;
  return k;
}

LagrangianFrame graph_lagrangian(const SymMatrix& t) {
  const Eigen::Index n = t.dim();
  Matrix g(2 * n, n);
  g.topRows(n).setIdentity();
  g.bottomRows(n) = t.matrix();
  return LagrangianFrame(g, 1e-10 * std::max(1.0, t.matrix().cwiseAbs().maxCoeff()));
}

LagrangianFrame horizontal_lagrangian(Eigen::Index n) { return graph_lagrangian(SymMatrix::zero(n)); }

LagrangianPath::LagrangianPath(Eigen::Index n, Eval eval, int smoothness_hint)
    : n_(n), eval_(std::move(eval)), hint_(smoothness_hint) {
  if (n_ < 1) throw InvalidInput("LagrangianPath: n must be positive");
  if (!eval_) throw InvalidInput("LagrangianPath: missing evaluation function");
}

Matrix LagrangianPath::eval(double lambda) const {
  Matrix f = eval_(lambda);
  if (f.rows() != 2 * n_ || f.cols() != n_) throw InvalidInput("LagrangianPath: frame has wrong shape");
  return orthonormalize(f);
}

LagrangianPath constant_lagrangian_path(const LagrangianFrame& l) {
  Matrix f = l.frame();
  return LagrangianPath(l.n(), [f](double) { return f; }, 8);
}

LagrangianPath concatenate(const LagrangianPath& p1, const LagrangianPath& p2) {
  if (p1.n() != p2.n()) throw InvalidInput("concatenate: dimension mismatch");
  const Matrix a = p1.eval(1.0), b = p2.eval(0.0);
  if (operator_norm(a * a.transpose() - b * b.transpose()) > 1e-8)
    throw InvalidInput("concatenate: Lagrangian paths do not meet");
  return LagrangianPath(
      p1.n(), [p1, p2](double l) { return l <= 0.5 ? p1.eval(2.0 * l) : p2.eval(2.0 * l - 1.0); },
      p1.smoothness_hint() + p2.smoothness_hint());
}

LagrangianPath restrict_path(const LagrangianPath& p, double lo, double hi) {
  if (!(0.0 <= lo && lo < hi && hi <= 1.0)) throw InvalidInput("restrict_path: need 0 <= lo < hi <= 1");
  return LagrangianPath(
      p.n(), [p, lo, hi](double l) { return p.eval(lo + (hi - lo) * l); }, p.smoothness_hint());
}

LagrangianPath reverse(const LagrangianPath& p) {
  return LagrangianPath(p.n(), [p](double l) { return p.eval(1.0 - l); }, p.smoothness_hint());
}

namespace {

// Z X^{-1} where X = F*^T F(lambda), Z = (J F*)^T F(lambda): the symmetric
// matrix of phi_lambda in the coordinates of the frame F*.
Matrix graph_coordinates(const Matrix& fstar, const Matrix& jfstar, const Matrix& f) {
  const Matrix x = fstar.transpose() * f;
  const Matrix z = jfstar.transpose() * f;
  // Solve M X = Z, i.e. X^T M^T = Z^T.
  return x.transpose().partialPivLu().solve(z.transpose()).transpose();
}

}  // namespace

MaslovReport maslov_index_general(const LagrangianPath& path, const Matrix& l0, const Matrix& j,
                                  const MaslovOptions& opts) {
  const Eigen::Index m = path.n();
  if (l0.rows() != 2 * m || l0.cols() != m) throw InvalidInput("maslov_index: reference frame has wrong shape");
  if (j.rows() != 2 * m || j.cols() != 2 * m) throw InvalidInput("maslov_index: symplectic matrix has wrong shape");
  const Matrix jl0 = j * l0;  // orthonormal basis of L0's orthogonal complement
  const double tol_rank = opts.tol.tol_rank;

  detail::ScanOptions so;
  so.samples = std::max(opts.scan_samples, 2);
  so.resolution = opts.tol.lambda_res;
  const detail::ScanResult scan = detail::scan_for_roots(
      [&](double lambda) {
        detail::ScanPoint p;
        const Vector s = singular_values(jl0.transpose() * path.eval(lambda));
        p.distance = s(s.size() - 1);
        p.zero_tol = tol_rank;
        return p;
      },
      so);

  // cos(angle) >= 1 - tol  <=>  sin(angle) <= sqrt(2 tol - tol^2).
  const double sine_cut = std::sqrt(2.0 * tol_rank - tol_rank * tol_rank);
  const double w = opts.fd_step;

  MaslovReport report;
  report.evaluations = scan.evaluations;
  for (const detail::Root& root : scan.roots) {
    const double ls = root.lambda;
    const Matrix fstar = path.eval(ls);
    const Matrix jfstar = j * fstar;

    Eigen::JacobiSVD<Matrix> svd(jl0.transpose() * fstar, Eigen::ComputeFullV);
    const Vector sv = svd.singularValues();
    const double cut = std::max(sine_cut, root.threshold);
    std::vector<Eigen::Index> cols;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
      if (sv(k) <= cut) cols.push_back(k);
    if (cols.empty()) continue;
    Matrix x(m, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) x.col(static_cast<Eigen::Index>(c)) = svd.matrixV().col(cols[c]);

    auto coords = [&](double l) { return graph_coordinates(fstar, jfstar, path.eval(l)); };
    Matrix dq;
    if (ls - w < 0.0) {
      dq = (-3.0 * coords(ls) + 4.0 * coords(ls + w) - coords(ls + 2.0 * w)) / (2.0 * w);
    } else if (ls + w > 1.0) {
      dq = (3.0 * coords(ls) - 4.0 * coords(ls - w) + coords(ls - 2.0 * w)) / (2.0 * w);
    } else {
      dq = (coords(ls + w) - coords(ls - w)) / (2.0 * w);
    }

    CrossingRecord rec;
    rec.lambda_star = ls;
    rec.kernel = fstar * x;
    rec.form = SymMatrix(Matrix(x.transpose() * dq * x));
    rec.index = quadform_index(rec.form, tol_rank);
    rec.regular = !rec.index.degenerate();
    if (!rec.regular) throw DegenerateCrossing(std::move(rec));
    report.crossings.push_back(std::move(rec));
  }
  report.value = assemble_crossings(report.crossings);
  return report;
}

MaslovReport maslov_index(const LagrangianPath& path, const LagrangianFrame& l0, const MaslovOptions& opts) {
  if (path.n() != l0.n()) throw InvalidInput("maslov_index: dimension mismatch");
  return maslov_index_general(path, l0.frame(), symplectic_j(path.n()), opts);
}

MaslovReport maslov_pair_index(const LagrangianPath& p1, const LagrangianPath& p2, const MaslovOptions& opts) {
  if (p1.n() != p2.n()) throw InvalidInput("maslov_pair_index: dimension mismatch");
  const Eigen::Index n = p1.n();
  const Matrix j = symplectic_j(n);
  Matrix jprod = Matrix::Zero(4 * n, 4 * n);
  jprod.topLeftCorner(2 * n, 2 * n) = j;
  jprod.bottomRightCorner(2 * n, 2 * n) = -j;
  Matrix diagonal(4 * n, 2 * n);
  diagonal.topRows(2 * n).setIdentity();
  diagonal.bottomRows(2 * n).setIdentity();
  diagonal /= std::sqrt(2.0);

  LagrangianPath product(
      2 * n,
      [p1, p2, n](double l) {
        Matrix f = Matrix::Zero(4 * n, 2 * n);
        f.topLeftCorner(2 * n, n) = p1.eval(l);
        f.bottomRightCorner(2 * n, n) = p2.eval(l);
        return f;
      },
      std::max(p1.smoothness_hint(), p2.smoothness_hint()));

  MaslovReport r = maslov_index_general(product, diagonal, jprod, opts);
  // Report intersections in R^{2n}: (u, u) / |(u, u)| -> sqrt(2) u.
  for (auto& c : r.crossings) c.kernel = Matrix(std::sqrt(2.0) * c.kernel.topRows(2 * n));
  return r;
}

MaslovReport graph_maslov_report(const OperatorPath& path, const MaslovOptions& opts) {
  LagrangianPath graphs(
      path.dim(), [path](double l) { return graph_lagrangian(path.eval(l)).frame(); }, path.smoothness_hint());
  return maslov_index(graphs, horizontal_lagrangian(path.dim()), opts);
}

int sfl_via_maslov(const OperatorPath& path, const MaslovOptions& opts) {
  return graph_maslov_report(path, opts).value;
}

AngleTrajectory angle_trajectory(const LagrangianPath& path, const LagrangianFrame& l0, int samples) {
  AngleTrajectory t;
  samples = std::max(samples, 1);
  for (int k = 0; k <= samples; ++k) {
    const double l = static_cast<double>(k) / samples;
    t.lambdas.push_back(l);
    t.angles.push_back(principal_angles(path.eval(l), l0.frame()));
  }
  return t;
}

}  // namespace sflow
