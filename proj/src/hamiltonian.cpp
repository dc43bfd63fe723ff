#include "sflow/hamiltonian.hpp"

#include <algorithm>
#include <cmath>

#include "sflow/detail/crossing_scan.hpp"

namespace sflow {

HamiltonianFamily::HamiltonianFamily(Eigen::Index n, Coefficient s, LagrangianPath bc1, LagrangianPath bc2,
                                     Coefficient s_deriv, int grid)
    : n_(n), s_(std::move(s)), s_deriv_(std::move(s_deriv)), bc1_(std::move(bc1)), bc2_(std::move(bc2)), grid_(grid) {
  if (n_ < 1) throw InvalidInput("HamiltonianFamily: n must be positive");
  if (!s_) throw InvalidInput("HamiltonianFamily: missing coefficient");
  if (bc1_.n() != n_ || bc2_.n() != n_) throw InvalidInput("HamiltonianFamily: boundary condition dimension mismatch");
  if (grid_ < 1) throw InvalidInput("HamiltonianFamily: grid must be positive");
}

namespace {

Matrix symmetric_checked(const Matrix& m, Eigen::Index n, const char* what) {
  if (m.rows() != 2 * n || m.cols() != 2 * n)
    throw InvalidInput(std::string("HamiltonianFamily: ") + what + " has wrong shape");
  return 0.5 * (m + m.transpose());
}

}  // namespace

Matrix HamiltonianFamily::s(double lambda, double t) const { return symmetric_checked(s_(lambda, t), n_, "S"); }

Matrix HamiltonianFamily::s_deriv(double lambda, double t) const {
  if (!s_deriv_) throw InvalidInput("HamiltonianFamily: no lambda-derivative of S attached");
  return symmetric_checked(s_deriv_(lambda, t), n_, "dS/dlambda");
}

HamiltonianFamily HamiltonianFamily::with_grid(int grid) const {
  HamiltonianFamily f = *this;
  if (grid < 1) throw InvalidInput("HamiltonianFamily: grid must be positive");
  f.grid_ = grid;
  return f;
}

HamiltonianFamily HamiltonianFamily::plus(const Coefficient& extra, const Coefficient& extra_deriv) const {
  Coefficient s = [base = s_, extra](double l, double t) { return Matrix(base(l, t) + extra(l, t)); };
  Coefficient ds;
  if (s_deriv_ && extra_deriv)
    ds = [base = s_deriv_, extra_deriv](double l, double t) { return Matrix(base(l, t) + extra_deriv(l, t)); };
  return HamiltonianFamily(n_, std::move(s), bc1_, bc2_, std::move(ds), grid_);
}

HamiltonianFamily HamiltonianFamily::reversed() const {
  Coefficient s = [base = s_](double l, double t) { return base(1.0 - l, t); };
  Coefficient ds;
  if (s_deriv_) ds = [base = s_deriv_](double l, double t) { return Matrix(-base(1.0 - l, t)); };
  return HamiltonianFamily(n_, std::move(s), reverse(bc1_), reverse(bc2_), std::move(ds), grid_);
}

namespace {

// J M for J = [[0, -I], [I, 0]]: a signed swap of the row blocks.
void apply_j(const Matrix& m, Eigen::Index n, Matrix& out) {
  out.resize(m.rows(), m.cols());
  out.topRows(n) = -m.bottomRows(n);
  out.bottomRows(n) = m.topRows(n);
}

double drift_of(const Matrix& psi, const Matrix& j) { return (psi.transpose() * j * psi - j).cwiseAbs().maxCoeff(); }

// RK4 for Psi' = J S Psi; calls `visit(k, t, psi)` at every node.
template <class Visit>
void integrate(const HamiltonianFamily& fam, double lambda, Visit&& visit) {
  const Eigen::Index n = fam.n();
  const int steps = fam.grid();
  const double h = 1.0 / steps;
  Matrix psi = Matrix::Identity(2 * n, 2 * n);
  Matrix a0, am, a1, k1, k2, k3, k4, tmp;
  visit(0, 0.0, psi);
  apply_j(fam.s(lambda, 0.0), n, a1);
  for (int k = 0; k < steps; ++k) {
    const double t = k * h;
    const double t1 = (k + 1 == steps) ? 1.0 : t + h;
    a0.swap(a1);
    apply_j(fam.s(lambda, t + 0.5 * h), n, am);
    apply_j(fam.s(lambda, t1), n, a1);
    k1.noalias() = a0 * psi;
    tmp = psi + (0.5 * h) * k1;
    k2.noalias() = am * tmp;
    tmp = psi + (0.5 * h) * k2;
    k3.noalias() = am * tmp;
    tmp = psi + h * k3;
    k4.noalias() = a1 * tmp;
    psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!psi.allFinite()) throw NumericalFailure("fundamental_solution: integration diverged", lambda);
    visit(k + 1, t1, psi);
  }
}

void check_drift(double drift, double lambda, const HamiltonianOptions& opts) {
  if (opts.check_drift && drift > 100.0 * opts.drift_threshold)
    throw NumericalFailure("fundamental_solution: symplectic drift too large; refine the time grid", lambda);
}

// Psi(1) only; drift is checked at the end point.
Matrix monodromy(const HamiltonianFamily& fam, double lambda, const HamiltonianOptions& opts) {
  Matrix end;
  const int steps = fam.grid();
  integrate(fam, lambda, [&](int k, double, const Matrix& psi) {
    if (k == steps) end = psi;
  });
  check_drift(drift_of(end, symplectic_j(fam.n())), lambda, opts);
  return end;
}

}  // namespace

FundamentalSolution fundamental_solution(const HamiltonianFamily& fam, double lambda, const HamiltonianOptions& opts) {
  const Matrix j = symplectic_j(fam.n());
  FundamentalSolution out;
  out.lambda = lambda;
  out.times.reserve(static_cast<std::size_t>(fam.grid()) + 1);
  out.psi.reserve(static_cast<std::size_t>(fam.grid()) + 1);
  integrate(fam, lambda, [&](int, double t, const Matrix& psi) {
    out.times.push_back(t);
    out.psi.push_back(psi);
    out.symplectic_drift = std::max(out.symplectic_drift, drift_of(psi, j));
  });
  check_drift(out.symplectic_drift, lambda, opts);
  return out;
}

namespace {

// Psi(1) frame(Lambda1) orthonormalized, together with its R factor so that
// initial values can be recovered.
struct Transport {
  Matrix f1;      // frame of Lambda1(lambda)
  ThinQR moved;   // Psi(1) f1 = q r
  Matrix f2;      // frame of Lambda2(lambda)
};

Transport transport(const HamiltonianFamily& fam, double lambda, const HamiltonianOptions& opts) {
  Transport t;
  t.f1 = fam.bc1().eval(lambda);
  t.moved = thin_qr(monodromy(fam, lambda, opts) * t.f1);
  t.f2 = fam.bc2().eval(lambda);
  return t;
}

double sine_cut(double tol_rank) { return std::sqrt(2.0 * tol_rank - tol_rank * tol_rank); }

// Initial values u(0) in Lambda1 of solutions: columns of f1 r^{-1} y where
// y spans the near-null space of (J f2)^T q.
Matrix solution_initial_values(const Transport& t, Eigen::Index n, double cut) {
  const Matrix w = (symplectic_j(n) * t.f2).transpose() * t.moved.q;
  Eigen::JacobiSVD<Matrix> svd(w, Eigen::ComputeFullV);
  const Vector sv = svd.singularValues();
  std::vector<Eigen::Index> cols;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) <= cut) cols.push_back(k);
  Matrix y(n, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) y.col(static_cast<Eigen::Index>(c)) = svd.matrixV().col(cols[c]);
  if (y.cols() == 0) return Matrix(2 * n, 0);
  const Matrix coeff = t.moved.r.triangularView<Eigen::Upper>().solve(y);
  return orthonormalize(t.f1 * coeff);
}

bool constant_path(const LagrangianPath& p) {
  const Matrix f0 = p.eval(0.0);
  const Matrix p0 = f0 * f0.transpose();
  for (double l : {0.125, 0.25, 0.5, 0.75, 1.0}) {
    const Matrix f = p.eval(l);
    if (operator_norm(f * f.transpose() - p0) > 1e-8) return false;
  }
  return true;
}

bool psd_on(const Matrix& m, double tol_rank) {
  const EigDecomp e = sym_eig(SymMatrix(m));
  return e.values(0) >= -tol_rank * scale_of(e);
}

}  // namespace

int kernel_dimension(const HamiltonianFamily& fam, double lambda, const HamiltonianOptions& opts) {
  const Transport t = transport(fam, lambda, opts);
  return intersection_dim(LagrangianFrame(t.moved.q, 1e-6), LagrangianFrame(t.f2), opts.tol.tol_rank);
}

SweepReport sweep_nontrivial(const HamiltonianFamily& fam, const HamiltonianOptions& opts) {
  const Eigen::Index n = fam.n();
  const Matrix j = symplectic_j(n);
  detail::ScanOptions so;
  so.samples = std::max(opts.sweep_samples, 2);
  so.resolution = opts.sweep_resolution;
  so.min_width = std::max(100.0 * opts.sweep_resolution, 1e-6);
  const double zero_tol = std::max(opts.tol.tol_rank, opts.drift_threshold);

  detail::ScanResult scan;
  try {
    scan = detail::scan_for_roots(
        [&](double lambda) {
          const Transport t = transport(fam, lambda, opts);
          const Vector s = singular_values((j * t.f2).transpose() * t.moved.q);
          detail::ScanPoint p;
          p.distance = s(s.size() - 1);
          p.zero_tol = zero_tol;
          return p;
        },
        so);
  } catch (const NumericalFailure& e) {
    if (std::string(e.what()).find("non-isolated") != std::string::npos)
      throw InvalidInput(std::string("sweep_nontrivial: continuum of solutions: ") + e.what());
    throw;
  }

  SweepReport report;
  const double cut = sine_cut(opts.tol.tol_rank);
  for (const detail::Root& root : scan.roots) {
    const Transport t = transport(fam, root.lambda, opts);
    SolutionRecord rec;
    rec.lambda = root.lambda;
    rec.initial_values = solution_initial_values(t, n, std::max(cut, root.threshold));
    rec.kernel_dim = static_cast<int>(rec.initial_values.cols());
    if (rec.kernel_dim > 0) report.solutions.push_back(std::move(rec));
  }
  report.count = static_cast<int>(report.solutions.size());

  try {
    const int mu = maslov_pair_index(fam.bc1(), fam.bc2(), opts.maslov).value;
    report.maslov_pair = mu;
    report.bound = static_cast<int>((std::abs(mu) + n - 1) / n);
    report.bound_satisfied = report.count >= *report.bound;
  } catch (const NumericalFailure& e) {
    report.maslov_note = e.what();
  }
  return report;
}

SflReport hamiltonian_sfl(const HamiltonianFamily& fam, const HamiltonianOptions& opts) {
  if (!fam.has_deriv()) throw InvalidInput("hamiltonian_sfl: dS/dlambda is required");
  if (!constant_path(fam.bc1()) || !constant_path(fam.bc2()))
    throw InvalidInput("hamiltonian_sfl: boundary conditions must not depend on lambda");

  HamiltonianOptions sweep_opts = opts;
  const SweepReport sweep = sweep_nontrivial(fam, sweep_opts);

  SflReport report;
  report.method = SflMethod::crossings;
  for (const SolutionRecord& sol : sweep.solutions) {
    const FundamentalSolution fs = fundamental_solution(fam, sol.lambda, opts);
    const Eigen::Index k = sol.initial_values.cols();
    Matrix gram = Matrix::Zero(k, k);
    Matrix form = Matrix::Zero(k, k);
    const std::size_t nodes = fs.psi.size();
    for (std::size_t m = 0; m < nodes; ++m) {
      const double w = (m == 0 || m + 1 == nodes) ? 0.5 : 1.0;
      const Matrix u = fs.psi[m] * sol.initial_values;
      gram += w * u.transpose() * u;
      form += w * u.transpose() * fam.s_deriv(sol.lambda, fs.times[m]) * u;
    }
    const double h = 1.0 / fam.grid();
    gram *= h;
    form *= h;
    // Express the form in an L2-orthonormal basis of the solution space.
    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() != Eigen::Success) throw NumericalFailure("hamiltonian_sfl: singular Gram matrix", sol.lambda);
    const Matrix lower = llt.matrixL();
    const Matrix half = lower.triangularView<Eigen::Lower>().solve(form);
    const Matrix whitened = lower.triangularView<Eigen::Lower>().solve(half.transpose()).transpose();

    CrossingRecord rec;
    rec.lambda_star = sol.lambda;
    rec.kernel = sol.initial_values;
    rec.form = SymMatrix(whitened);
    rec.index = quadform_index(rec.form, opts.tol.tol_rank);
    rec.regular = !rec.index.degenerate();
    if (!rec.regular) throw DegenerateCrossing(std::move(rec));
    report.crossings.push_back(std::move(rec));
  }
  report.value = assemble_crossings(report.crossings);
  return report;
}

ComparisonResult comparison_check(const OperatorPath& a, const OperatorPath& k, const OperatorPath& k_prime,
                                  const SflOptions& opts) {
  if (a.dim() != k.dim() || a.dim() != k_prime.dim()) throw InvalidInput("comparison_check: dimension mismatch");
  const double tol = opts.tol.tol_rank;
  if (!psd_on((k_prime.eval(0.0) - k.eval(0.0)).matrix(), tol))
    throw InvalidInput("comparison_check: K'(0) - K(0) is not positive semidefinite");
  if (!psd_on((k.eval(1.0) - k_prime.eval(1.0)).matrix(), tol))
    throw InvalidInput("comparison_check: K(1) - K'(1) is not positive semidefinite");
  ComparisonResult r;
  r.sfl_k = sfl_partition(add_paths(a, k), opts).value;
  r.sfl_k_prime = sfl_partition(add_paths(a, k_prime), opts).value;
  r.holds = r.sfl_k >= r.sfl_k_prime;
  return r;
}

ComparisonResult comparison_check(const HamiltonianFamily& base, const HamiltonianFamily::Coefficient& k,
                                  const HamiltonianFamily::Coefficient& k_deriv,
                                  const HamiltonianFamily::Coefficient& k_prime,
                                  const HamiltonianFamily::Coefficient& k_prime_deriv,
                                  const HamiltonianOptions& opts) {
  const double tol = opts.tol.tol_rank;
  const int steps = base.grid();
  for (int m = 0; m <= steps; ++m) {
    const double t = static_cast<double>(m) / steps;
    if (!psd_on(k_prime(0.0, t) - k(0.0, t), tol))
      throw InvalidInput("comparison_check: K'(0) - K(0) is not positive semidefinite");
    if (!psd_on(k(1.0, t) - k_prime(1.0, t), tol))
      throw InvalidInput("comparison_check: K(1) - K'(1) is not positive semidefinite");
  }
  ComparisonResult r;
  r.sfl_k = hamiltonian_sfl(base.plus(k, k_deriv), opts).value;
  r.sfl_k_prime = hamiltonian_sfl(base.plus(k_prime, k_prime_deriv), opts).value;
  r.holds = r.sfl_k >= r.sfl_k_prime;
  return r;
}

IsolatedBound isolated_bound_check(const OperatorPath& path, double lambda_star, const SflOptions& opts) {
  if (!(lambda_star > 0.0 && lambda_star < 1.0)) throw InvalidInput("isolated_bound_check: lambda* must be interior");
  const auto events = locate_kernel_events(path, opts);
  if (events.size() != 1) throw InvalidInput("isolated_bound_check: expected exactly one crossing");
  if (std::abs(events.front().lambda - lambda_star) > 1e-6)
    throw InvalidInput("isolated_bound_check: the crossing is not at lambda*");
  IsolatedBound b;
  b.sfl_abs = std::abs(sfl_partition(path, opts).value);
  b.kernel_dim = events.front().kernel_dim;
  b.holds = b.sfl_abs <= b.kernel_dim;
  return b;
}

IsolatedBound isolated_bound_check(const HamiltonianFamily& fam, double lambda_star, const HamiltonianOptions& opts) {
  if (!(lambda_star > 0.0 && lambda_star < 1.0)) throw InvalidInput("isolated_bound_check: lambda* must be interior");
  const SweepReport sweep = sweep_nontrivial(fam, opts);
  if (sweep.solutions.size() != 1) throw InvalidInput("isolated_bound_check: expected exactly one crossing");
  if (std::abs(sweep.solutions.front().lambda - lambda_star) > 1e-6)
    throw InvalidInput("isolated_bound_check: the crossing is not at lambda*");
  IsolatedBound b;
  b.sfl_abs = std::abs(hamiltonian_sfl(fam, opts).value);
  b.kernel_dim = sweep.solutions.front().kernel_dim;
  b.holds = b.sfl_abs <= b.kernel_dim;
  return b;
}

}  // namespace sflow
