#include "sflow/generators.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace sflow::gen {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double weight(TrigFamily::Weight w, double l) { return w == TrigFamily::Weight::one ? 1.0 : l * (1.0 - l); }
double weight_deriv(TrigFamily::Weight w, double l) { return w == TrigFamily::Weight::one ? 0.0 : 1.0 - 2.0 * l; }

Matrix givens(Eigen::Index dim, Eigen::Index i, Eigen::Index j, double theta) {
  Matrix g = Matrix::Identity(dim, dim);
  const double c = std::cos(theta), s = std::sin(theta);
  g(i, i) = c;
  g(j, j) = c;
  g(i, j) = -s;
  g(j, i) = s;
  return g;
}

Matrix givens_deriv(Eigen::Index dim, Eigen::Index i, Eigen::Index j, double theta) {
  Matrix g = Matrix::Zero(dim, dim);
  const double c = std::cos(theta), s = std::sin(theta);
  g(i, i) = -s;
  g(j, j) = -s;
  g(i, j) = -c;
  g(j, i) = c;
  return g;
}

OperatorPath scaled(const OperatorPath& p, double c) {
  OperatorPath::Eval d;
  if (p.has_deriv()) d = [p, c](double l) { return p.deriv(l) * c; };
  return OperatorPath(p.dim(), [p, c](double l) { return p.eval(l) * c; }, d, p.smoothness_hint());
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Matrix random_symmetric(Rng& rng, Eigen::Index dim, double scale) {
  Matrix m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) m(i, j) = m(j, i) = scale * rng.uniform(-1.0, 1.0);
  return m;
}

Matrix random_psd(Rng& rng, Eigen::Index dim, int rank, double scale) {
  if (rank < 0) rank = rng.integer(0, static_cast<int>(dim));
  Matrix g(dim, rank);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (int j = 0; j < rank; ++j) g(i, j) = rng.uniform(-1.0, 1.0);
  Matrix p = scale * g * g.transpose();
  return 0.5 * (p + p.transpose());
}

Matrix random_orthogonal(Rng& rng, Eigen::Index dim) {
  Matrix g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = rng.uniform(-1.0, 1.0);
  return thin_qr(g, 1e-14).q;
}

TrigFamily::TrigFamily(Eigen::Index dim, std::vector<Rotation> rotations, std::vector<Entry> entries,
                       Weight rotation_weight, Weight entry_weight)
    : dim_(dim),
      rotations_(std::move(rotations)),
      entries_(std::move(entries)),
      rotation_weight_(rotation_weight),
      entry_weight_(entry_weight) {
  if (dim_ < 1 || static_cast<Eigen::Index>(entries_.size()) != dim_)
    throw InvalidInput("TrigFamily: need one diagonal entry per dimension");
  for (const auto& r : rotations_)
    if (r.i < 0 || r.j < 0 || r.i >= dim_ || r.j >= dim_ || r.i == r.j)
      throw InvalidInput("TrigFamily: bad rotation plane");
}

TrigFamily::Eval TrigFamily::evaluate(double s, double l, bool wrt_lambda) const {
  const std::size_t m = rotations_.size();
  std::vector<Matrix> g(m), dg(m);
  const double w = weight(rotation_weight_, l), dw = weight_deriv(rotation_weight_, l);
  for (std::size_t k = 0; k < m; ++k) {
    const Rotation& r = rotations_[k];
    const double arg1 = kTwoPi * r.freq * l + r.phase;
    const double arg2 = kTwoPi * (r.s_freq * s + r.s_shift * l) + r.s_phase;
    const double theta = r.base + r.amp * std::sin(arg1) + w * r.s_amp * std::sin(arg2);
    const double dtheta =
        wrt_lambda ? r.amp * kTwoPi * r.freq * std::cos(arg1) + dw * r.s_amp * std::sin(arg2) +
                         w * r.s_amp * kTwoPi * r.s_shift * std::cos(arg2)
                   : w * r.s_amp * kTwoPi * r.s_freq * std::cos(arg2);
    g[k] = givens(dim_, r.i, r.j, theta);
    dg[k] = givens_deriv(dim_, r.i, r.j, theta) * dtheta;
  }
  Eval e;
  // prefix[k] = g[0] ... g[k-1], suffix[k] = g[k] ... g[m-1]
  std::vector<Matrix> prefix(m + 1, Matrix::Identity(dim_, dim_)), suffix(m + 1, Matrix::Identity(dim_, dim_));
  for (std::size_t k = 0; k < m; ++k) prefix[k + 1] = prefix[k] * g[k];
  for (std::size_t k = m; k-- > 0;) suffix[k] = g[k] * suffix[k + 1];
  e.u = prefix[m];
  e.du = Matrix::Zero(dim_, dim_);
  for (std::size_t k = 0; k < m; ++k) e.du += prefix[k] * dg[k] * suffix[k + 1];

  const double v = weight(entry_weight_, l), dv = weight_deriv(entry_weight_, l);
  e.d.resize(dim_);
  e.dd.resize(dim_);
  for (Eigen::Index i = 0; i < dim_; ++i) {
    const Entry& q = entries_[static_cast<std::size_t>(i)];
    const double arg1 = kTwoPi * q.freq * l + q.phase;
    const double arg2 = kTwoPi * (q.s_freq * s + q.s_shift * l) + q.s_phase;
    const double p = q.drift * l + q.offset + q.wiggle * std::sin(arg1) + v * q.s_amp * std::sin(arg2);
    const double dp = wrt_lambda ? q.drift + q.wiggle * kTwoPi * q.freq * std::cos(arg1) +
                                       dv * q.s_amp * std::sin(arg2) + v * q.s_amp * kTwoPi * q.s_shift * std::cos(arg2)
                                 : v * q.s_amp * kTwoPi * q.s_freq * std::cos(arg2);
    e.d(i) = q.amp * std::sin(kPi * p);
    e.dd(i) = q.amp * kPi * std::cos(kPi * p) * dp;
  }
  return e;
}

Vector TrigFamily::diagonal(double s, double lambda) const { return evaluate(s, lambda, true).d; }

SymMatrix TrigFamily::eval(double s, double lambda) const {
  const Eval e = evaluate(s, lambda, true);
  return SymMatrix(Matrix(e.u.transpose() * e.d.asDiagonal() * e.u));
}

SymMatrix TrigFamily::d_lambda(double s, double lambda) const {
  const Eval e = evaluate(s, lambda, true);
  const Matrix du_d_u = e.du.transpose() * e.d.asDiagonal() * e.u;
  return SymMatrix(Matrix(du_d_u + du_d_u.transpose() + e.u.transpose() * e.dd.asDiagonal() * e.u));
}

SymMatrix TrigFamily::d_s(double s, double lambda) const {
  const Eval e = evaluate(s, lambda, false);
  const Matrix du_d_u = e.du.transpose() * e.d.asDiagonal() * e.u;
  return SymMatrix(Matrix(du_d_u + du_d_u.transpose() + e.u.transpose() * e.dd.asDiagonal() * e.u));
}

OperatorPath TrigFamily::lambda_path(double s) const {
  TrigFamily f = *this;
  return OperatorPath(
      dim_, [f, s](double l) { return f.eval(s, l); }, [f, s](double l) { return f.d_lambda(s, l); }, 64);
}

OperatorPath TrigFamily::s_path(double lambda) const {
  TrigFamily f = *this;
  return OperatorPath(
      dim_, [f, lambda](double s) { return f.eval(s, lambda); }, [f, lambda](double s) { return f.d_s(s, lambda); },
      64);
}

namespace {

std::vector<TrigFamily::Rotation> random_rotations(Rng& rng, Eigen::Index dim, bool periodic) {
  std::vector<TrigFamily::Rotation> rots;
  if (dim < 2) return rots;
  auto draw = [&](Eigen::Index i, Eigen::Index j) {
    TrigFamily::Rotation r;
    r.i = i;
    r.j = j;
    r.base = rng.uniform(-kPi, kPi);
    r.amp = rng.uniform(0.0, 1.2);
    r.freq = rng.integer(1, 2);
    r.phase = rng.uniform(0.0, kTwoPi);
    r.s_freq = 1.0;
    r.s_shift = periodic ? rng.integer(0, 1) : rng.uniform(-1.0, 1.0);
    r.s_phase = rng.uniform(0.0, kTwoPi);
    rots.push_back(r);
  };
  for (Eigen::Index i = 0; i + 1 < dim; ++i) draw(i, i + 1);
  for (Eigen::Index k = 0; k < dim / 2; ++k) {
    const auto i = static_cast<Eigen::Index>(rng.integer(0, static_cast<int>(dim) - 1));
    auto j = static_cast<Eigen::Index>(rng.integer(0, static_cast<int>(dim) - 2));
    if (j >= i) ++j;
    draw(i, j);
  }
  return rots;
}

// An entry whose phase drifts by `crossings` (signed) over [0, 1].
TrigFamily::Entry random_entry(Rng& rng, int crossings) {
  TrigFamily::Entry e;
  e.amp = rng.sign() * rng.uniform(0.5, 2.0);
  e.drift = crossings;
  e.freq = rng.integer(1, 2);
  e.phase = rng.uniform(0.0, kTwoPi);
  if (crossings == 0) {
    e.offset = rng.uniform(0.3, 0.7);
    e.wiggle = rng.uniform(0.0, 0.1);
  } else {
    e.offset = rng.uniform(0.1, 0.9);
    e.wiggle = rng.uniform(0.0, 0.05);
  }
  e.s_freq = 1.0;
  e.s_phase = rng.uniform(0.0, kTwoPi);
  return e;
}

}  // namespace

TrigFamily generate_operator_family(std::uint64_t seed, Eigen::Index dim, int crossing_budget) {
  if (dim < 1) throw InvalidInput("generate_operator_path: dim must be positive");
  Rng rng(seed);
  std::vector<int> per_entry(static_cast<std::size_t>(dim), 0);
  for (int c = 0; c < crossing_budget; ++c) ++per_entry[static_cast<std::size_t>(rng.integer(0, static_cast<int>(dim) - 1))];
  auto rots = random_rotations(rng, dim, false);
  std::vector<TrigFamily::Entry> entries;
  for (Eigen::Index i = 0; i < dim; ++i) {
    const int k = per_entry[static_cast<std::size_t>(i)];
    entries.push_back(random_entry(rng, k == 0 ? 0 : static_cast<int>(rng.sign()) * k));
  }
  return TrigFamily(dim, std::move(rots), std::move(entries));
}

OperatorPath generate_operator_path(std::uint64_t seed, Eigen::Index dim, int crossing_budget) {
  return generate_operator_family(seed, dim, crossing_budget).lambda_path(0.0);
}

std::string to_string(HomotopyMode m) {
  switch (m) {
    case HomotopyMode::generic: return "generic";
    case HomotopyMode::free_loop: return "free_loop";
    case HomotopyMode::fixed_edge: return "fixed_edge";
    case HomotopyMode::invertible_edge: return "invertible_edge";
  }
  return "generic";
}

HomotopyMode homotopy_mode_from_string(const std::string& s) {
  for (auto m : {HomotopyMode::generic, HomotopyMode::free_loop, HomotopyMode::fixed_edge, HomotopyMode::invertible_edge})
    if (to_string(m) == s) return m;
  throw InvalidInput("unknown homotopy mode '" + s + "'");
}

TrigFamily generate_homotopy(std::uint64_t seed, Eigen::Index dim, HomotopyMode mode) {
  if (dim < 1) throw InvalidInput("generate_homotopy: dim must be positive");
  Rng rng(seed);
  const bool periodic = mode == HomotopyMode::free_loop;
  auto rots = random_rotations(rng, dim, periodic);
  for (auto& r : rots) r.s_amp = rng.uniform(0.0, 1.0);
  std::vector<TrigFamily::Entry> entries;
  for (Eigen::Index i = 0; i < dim; ++i) {
    int k = rng.integer(0, 2);
    if (periodic) k = 2 * rng.integer(0, 1);
    TrigFamily::Entry e = random_entry(rng, k == 0 ? 0 : static_cast<int>(rng.sign()) * k);
    e.s_shift = periodic ? rng.integer(0, 1) : rng.uniform(-1.0, 1.0);
    // Large s-amplitudes let crossings appear and disappear across the square.
    e.s_amp = rng.uniform(0.0, 0.8);
    entries.push_back(e);
  }
  TrigFamily::Weight rw = TrigFamily::Weight::one, ew = TrigFamily::Weight::one;
  if (mode == HomotopyMode::fixed_edge) rw = ew = TrigFamily::Weight::bubble;
  if (mode == HomotopyMode::invertible_edge) ew = TrigFamily::Weight::bubble;
  return TrigFamily(dim, std::move(rots), std::move(entries), rw, ew);
}

OperatorPath constant_kernel_path(std::uint64_t seed, Eigen::Index dim, int kernel_dim) {
  if (kernel_dim < 0 || kernel_dim > dim) throw InvalidInput("constant_kernel_path: bad kernel dimension");
  Rng rng(seed);
  auto rots = random_rotations(rng, dim, false);
  std::vector<TrigFamily::Entry> entries;
  for (Eigen::Index i = 0; i < dim; ++i) {
    TrigFamily::Entry e;
    e.offset = 0.5;
    e.amp = i < kernel_dim ? 0.0 : rng.sign() * rng.uniform(0.5, 2.0);
    entries.push_back(e);
  }
  return TrigFamily(dim, std::move(rots), std::move(entries)).lambda_path(0.0);
}

OperatorPath single_crossing_path(std::uint64_t seed, Eigen::Index dim, int kernel_dim, double lambda_star) {
  if (kernel_dim < 1 || kernel_dim > dim) throw InvalidInput("single_crossing_path: bad kernel dimension");
  if (!(lambda_star > 0.0 && lambda_star < 1.0)) throw InvalidInput("single_crossing_path: lambda* must be interior");
  Rng rng(seed);
  auto rots = random_rotations(rng, dim, false);
  std::vector<TrigFamily::Entry> entries;
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (i < kernel_dim) {
      // amp sin(pi (lambda - lambda*)) vanishes on [0, 1] only at lambda*.
      TrigFamily::Entry e;
      e.amp = rng.sign() * rng.uniform(0.5, 2.0);
      e.drift = 1.0;
      e.offset = -lambda_star;
      entries.push_back(e);
    } else {
      entries.push_back(random_entry(rng, 0));
    }
  }
  return TrigFamily(dim, std::move(rots), std::move(entries)).lambda_path(0.0);
}

OperatorPath np_path() {
  return OperatorPath(
      3,
      [](double l) {
        Vector d(3);
        d << l - 0.5, 1.0, -1.0;
        return SymMatrix::diagonal(d);
      },
      [](double) {
        Vector d(3);
        d << 1.0, 0.0, 0.0;
        return SymMatrix::diagonal(d);
      },
      16);
}

SymMatrix random_with_kernel(std::uint64_t seed, Eigen::Index dim, int kernel_dim) {
  if (kernel_dim < 0 || kernel_dim >= dim) throw InvalidInput("random_with_kernel: need 0 <= kernel_dim < dim");
  Rng rng(seed);
  const Matrix q = random_orthogonal(rng, dim);
  Vector d(dim);
  for (Eigen::Index i = 0; i < dim; ++i) d(i) = i < kernel_dim ? 0.0 : rng.sign() * rng.uniform(0.5, 3.0);
  return SymMatrix(Matrix(q * d.asDiagonal() * q.transpose()));
}

Matrix random_lagrangian(Rng& rng, Eigen::Index n) {
  Eigen::MatrixXcd z(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) z(i, j) = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
  const Eigen::MatrixXcd u = Eigen::HouseholderQR<Eigen::MatrixXcd>(z).householderQ() * Eigen::MatrixXcd::Identity(n, n);
  Matrix f(2 * n, n);
  f.topRows(n) = u.real();
  f.bottomRows(n) = u.imag();
  return f;
}

namespace {

LagrangianPath constant_frame(const Matrix& f) {
  return LagrangianPath(f.cols(), [f](double) { return f; }, 8);
}

Matrix e1_frame() {
  Matrix f(2, 1);
  f << 1.0, 0.0;
  return f;
}

}  // namespace

HamiltonianFamily rotation_family(double c, int grid) {
  const LagrangianPath bc = constant_frame(e1_frame());
  return HamiltonianFamily(
      1, [c](double l, double) { return Matrix(c * l * Matrix::Identity(2, 2)); }, bc, bc,
      [c](double, double) { return Matrix(c * Matrix::Identity(2, 2)); }, grid);
}

HamiltonianFamily rotating_boundary_family(double turn, double eps, int grid) {
  LagrangianPath bc1(
      1,
      [turn](double l) {
        Matrix f(2, 1);
        f << std::cos(turn * l), std::sin(turn * l);
        return f;
      },
      64);
  return HamiltonianFamily(
      1, [eps](double l, double) { return Matrix(eps * (2.0 * l - 1.0) * Matrix::Identity(2, 2)); }, bc1,
      constant_frame(e1_frame()), [eps](double, double) { return Matrix(2.0 * eps * Matrix::Identity(2, 2)); },
      grid);
}

CountBoundInstance count_bound_instance(std::uint64_t seed, int grid, const MaslovOptions& opts) {
  Rng rng(seed);
  const Eigen::Index n = rng.integer(1, 2);
  const Matrix f1 = random_lagrangian(rng, n);
  const Matrix f2 = random_lagrangian(rng, n);
  // Lambda1(lambda) = diag(exp(i theta_k(lambda))) Lambda1(0), acting on X + iY.
  std::vector<double> theta0, turn, wig, wfreq, wphase;
  for (Eigen::Index k = 0; k < n; ++k) {
    theta0.push_back(rng.uniform(0.0, kTwoPi));
    turn.push_back(rng.sign() * rng.uniform(0.5 * kPi, 3.5 * kPi));
    wig.push_back(rng.uniform(0.0, 0.3));
    wfreq.push_back(rng.integer(1, 2));
    wphase.push_back(rng.uniform(0.0, kTwoPi));
  }
  LagrangianPath bc1(
      n,
      [=](double l) {
        const Matrix x = f1.topRows(n), y = f1.bottomRows(n);
        Matrix f(2 * n, n);
        for (Eigen::Index k = 0; k < n; ++k) {
          const auto ku = static_cast<std::size_t>(k);
          const double th = theta0[ku] + turn[ku] * l + wig[ku] * std::sin(kTwoPi * wfreq[ku] * l + wphase[ku]);
          const double c = std::cos(th), s = std::sin(th);
          f.row(k) = c * x.row(k) - s * y.row(k);
          f.row(n + k) = s * x.row(k) + c * y.row(k);
        }
        return f;
      },
      64);
  const LagrangianPath bc2 = constant_frame(f2);
  const int mu = maslov_pair_index(bc1, bc2, opts).value;

  const double sgn = mu >= 0 ? 1.0 : -1.0;  // mu > 0: S_0 <= 0 <= S_1
  const double eps = rng.uniform(0.1, 1.5);
  const Matrix p0 = random_psd(rng, 2 * n, -1, eps);
  const Matrix p1 = random_psd(rng, 2 * n, -1, eps);
  const Matrix mid = random_symmetric(rng, 2 * n, rng.uniform(0.0, 2.0));
  const Matrix osc = random_symmetric(rng, 2 * n, 0.5);
  auto p = [p0, p1](double t) { return Matrix(p0 + t * p1); };
  auto m = [mid, osc](double t) { return Matrix(mid + std::cos(kTwoPi * t) * osc); };
  HamiltonianFamily fam(
      n, [=](double l, double t) { return Matrix(sgn * (2.0 * l - 1.0) * p(t) + l * (1.0 - l) * m(t)); }, bc1, bc2,
      [=](double l, double t) { return Matrix(sgn * 2.0 * p(t) + (1.0 - 2.0 * l) * m(t)); }, grid);
  return {std::move(fam), mu};
}

HamiltonianComparisonInstance hamiltonian_comparison_instance(std::uint64_t seed, Eigen::Index n, int grid) {
  Rng rng(seed);
  const Eigen::Index m = 2 * n;
  const LagrangianPath bc1 = constant_frame(random_lagrangian(rng, n));
  const LagrangianPath bc2 = constant_frame(random_lagrangian(rng, n));
  const Matrix m0 = random_symmetric(rng, m, 2.0);
  const Matrix m2 = random_symmetric(rng, m, 1.0);
  const Matrix m1 = random_symmetric(rng, m, 2.0) + rng.sign() * rng.uniform(2.0, 6.0) * Matrix::Identity(m, m);
  const Matrix p0a = random_psd(rng, m, -1, rng.uniform(0.0, 2.0));
  const Matrix p0b = random_psd(rng, m, -1, rng.uniform(0.0, 1.0));
  const Matrix p1a = random_psd(rng, m, -1, rng.uniform(0.0, 2.0));
  const Matrix p1b = random_psd(rng, m, -1, rng.uniform(0.0, 1.0));

  HamiltonianComparisonInstance inst{
      HamiltonianFamily(
          n, [m](double, double) { return Matrix(Matrix::Zero(m, m)); }, bc1, bc2,
          [m](double, double) { return Matrix(Matrix::Zero(m, m)); }, grid),
      {}, {}, {}, {}};
  auto k = [=](double l, double t) { return Matrix(m0 + std::cos(kTwoPi * t) * m2 + l * m1); };
  auto p0 = [=](double t) { return Matrix(p0a + t * p0b); };
  auto p1 = [=](double t) { return Matrix(p1a + (1.0 - t) * p1b); };
  inst.k = k;
  inst.k_deriv = [=](double, double) { return m1; };
  inst.k_prime = [=](double l, double t) { return Matrix(k(l, t) + (1.0 - l) * p0(t) - l * p1(t)); };
  inst.k_prime_deriv = [=](double, double t) { return Matrix(m1 - p0(t) - p1(t)); };
  return inst;
}

MatrixComparisonInstance matrix_comparison_instance(std::uint64_t seed, Eigen::Index dim) {
  Rng rng(seed);
  const OperatorPath a = generate_operator_path(rng.bits(), dim, rng.integer(0, 3));
  const OperatorPath k = scaled(generate_operator_path(rng.bits(), dim, rng.integer(0, 2)), rng.uniform(0.0, 1.0));
  const Matrix p0 = random_psd(rng, dim, -1, rng.uniform(0.0, 2.0));
  const Matrix p1 = random_psd(rng, dim, -1, rng.uniform(0.0, 2.0));
  OperatorPath k_prime(
      dim, [k, p0, p1](double l) { return k.eval(l) + SymMatrix(Matrix((1.0 - l) * p0 - l * p1)); },
      [k, p0, p1](double l) { return k.deriv(l) + SymMatrix(Matrix(-p0 - p1)); }, 64);
  return {a, k, k_prime};
}

}  // namespace sflow::gen
