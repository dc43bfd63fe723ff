#include "sflow/specflow.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "sflow/detail/crossing_scan.hpp"

namespace sflow {

OperatorPath::OperatorPath(Eigen::Index dim, Eval eval, Eval deriv, int smoothness_hint)
    : dim_(dim), eval_(std::move(eval)), deriv_(std::move(deriv)), smoothness_hint_(smoothness_hint) {
  if (dim_ < 1) throw InvalidInput("OperatorPath: dim must be positive");
  if (!eval_) throw InvalidInput("OperatorPath: missing evaluation function");
  if (smoothness_hint_ < 1) throw InvalidInput("OperatorPath: smoothness hint must be positive");
}

SymMatrix OperatorPath::eval(double lambda) const {
  SymMatrix m = eval_(lambda);
  if (m.dim() != dim_) throw InvalidInput("OperatorPath: evaluation returned wrong dimension");
  return m;
}

SymMatrix OperatorPath::deriv(double lambda) const {
  if (!deriv_) throw InvalidInput("OperatorPath: no derivative attached");
  SymMatrix m = deriv_(lambda);
  if (m.dim() != dim_) throw InvalidInput("OperatorPath: derivative returned wrong dimension");
  return m;
}

int CrossingRecord::contribution() const {
  if (lambda_star == 0.0) return -index.negative;
  if (lambda_star == 1.0) return index.positive;  // m^-(-form)
  return index.signature();
}

std::string to_string(SflMethod m) { return m == SflMethod::partition ? "partition" : "crossings"; }

namespace {

std::string degenerate_message(const CrossingRecord& r) {
  std::ostringstream os;
  os.precision(17);
  os << "degenerate crossing form at lambda=" << r.lambda_star << " (kernel dim " << r.kernel.cols()
     << ")";
  return os.str();
}

// ---------------------------------------------------------------------------
// Partition method

class PartitionRun {
 public:
  PartitionRun(const OperatorPath& path, const SflOptions& opts) : path_(path), opts_(opts) {}

  int run(int segments, std::vector<WindowSegment>& out) {
    int value = 0;
    for (int k = 0; k < segments; ++k) {
      const double lo = static_cast<double>(k) / segments;
      const double hi = static_cast<double>(k + 1) / segments;
      value += certify(lo, hi, 0, out);
    }
    return value;
  }

  int evaluations() const { return evaluations_; }
  int max_depth() const { return max_depth_; }

 private:
  struct Spectrum {
    Vector values;
    double zero_tol = 0.0;
  };

  const Spectrum& spectrum(double lambda) {
    auto it = cache_.find(lambda);
    if (it != cache_.end()) return it->second;
    ++evaluations_;
    const EigDecomp e = sym_eig(path_.eval(lambda));
    Spectrum s{e.values, opts_.tol.tol_rank * scale_of(e)};
    return cache_.emplace(lambda, std::move(s)).first->second;
  }

  static int count_window(const Spectrum& s, double a) {
    int c = 0;
    for (Eigen::Index j = 0; j < s.values.size(); ++j)
      if (s.values(j) >= -s.zero_tol && s.values(j) <= a) ++c;
    return c;
  }

  static std::pair<int, int> outside_counts(const Vector& v, double a) {
    int below = 0, above = 0;
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      if (v(j) < -a) ++below;
      if (v(j) > a) ++above;
    }
    return {below, above};
  }

  int certify(double lo, double hi, int depth, std::vector<WindowSegment>& out) {
    max_depth_ = std::max(max_depth_, depth);
    const int inner = std::max(0, opts_.segment_samples);
    std::vector<const Spectrum*> samples;
    samples.reserve(static_cast<std::size_t>(inner) + 2);
    for (int i = 0; i <= inner + 1; ++i) {
      const double lambda = (i == inner + 1) ? hi : lo + (hi - lo) * i / (inner + 1);
      samples.push_back(&spectrum(lambda));
    }

    std::vector<double> mags;
    double zero_floor = 0.0;
    for (const Spectrum* s : samples) {
      for (Eigen::Index j = 0; j < s->values.size(); ++j) mags.push_back(std::abs(s->values(j)));
      zero_floor = std::max(zero_floor, 10.0 * s->zero_tol);
    }
    std::sort(mags.begin(), mags.end());

    std::vector<double> candidates;
    for (std::size_t i = 0; i + 1 < mags.size(); ++i) {
      if (mags[i + 1] <= mags[i]) continue;
      candidates.push_back(mags[i] > 0.0 ? std::sqrt(mags[i] * mags[i + 1]) : 0.5 * mags[i + 1]);
    }
    candidates.push_back(mags.back() > 0.0 ? 1.5 * mags.back() : 1.0);
    std::sort(candidates.begin(), candidates.end());

    const double m = opts_.margin;
    for (double a : candidates) {
      if (a < zero_floor) continue;
      const double band_lo = a * (1.0 - m);
      const double band_hi = a * (1.0 + m);
      auto in_band = std::lower_bound(mags.begin(), mags.end(), band_lo);
      if (in_band != mags.end() && *in_band <= band_hi) continue;

      const auto ref = outside_counts(samples.front()->values, a);
      bool stable = true;
      for (const Spectrum* s : samples) {
        if (outside_counts(s->values, a) != ref) {
          stable = false;
          break;
        }
      }
      if (!stable) continue;

      WindowSegment seg;
      seg.lambda_lo = lo;
      seg.lambda_hi = hi;
      seg.a = a;
      seg.count_lo = count_window(*samples.front(), a);
      seg.count_hi = count_window(*samples.back(), a);
      seg.depth = depth;
      out.push_back(seg);
      return seg.count_hi - seg.count_lo;
    }

    if (depth >= opts_.max_depth)
      throw NumericalFailure("sfl_partition: no certified spectral window after maximal refinement",
                             0.5 * (lo + hi));
    const double mid = 0.5 * (lo + hi);
    return certify(lo, mid, depth + 1, out) + certify(mid, hi, depth + 1, out);
  }

  const OperatorPath& path_;
  const SflOptions& opts_;
  std::map<double, Spectrum> cache_;
  int evaluations_ = 0;
  int max_depth_ = 0;
};

// ---------------------------------------------------------------------------
// Crossing method

detail::ScanOptions scan_options(const SflOptions& opts) {
  detail::ScanOptions s;
  s.samples = std::max(opts.scan_samples, 2);
  s.resolution = opts.tol.lambda_res;
  return s;
}

detail::ScanFunction eigen_scan(const OperatorPath& path, double tol_rank) {
  return [&path, tol_rank](double lambda) {
    const EigDecomp e = sym_eig(path.eval(lambda));
    detail::ScanPoint p;
    p.distance = e.values.cwiseAbs().minCoeff();
    p.zero_tol = tol_rank * scale_of(e);
    p.branches = e.values;
    return p;
  };
}

Matrix kernel_at(const OperatorPath& path, double lambda, double threshold) {
  const EigDecomp e = sym_eig(path.eval(lambda));
  std::vector<Eigen::Index> cols;
  for (Eigen::Index k = 0; k < e.values.size(); ++k)
    if (std::abs(e.values(k)) <= threshold) cols.push_back(k);
  Matrix out(path.dim(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = e.vectors.col(cols[j]);
  return out;
}

// The form restricted to the same kernel keeps its inertia across the
// localization window; a sign change there means a degenerate crossing that
// the localization error made look regular.
bool form_stable(const OperatorPath& path, const CrossingRecord& rec, const SflOptions& opts) {
  const double w = std::max(1e-6, 100.0 * opts.tol.lambda_res);
  for (double l : {std::max(0.0, rec.lambda_star - w), std::min(1.0, rec.lambda_star + w)}) {
    const QuadFormIndex q =
        quadform_index(SymMatrix(rec.kernel.transpose() * path.deriv(l).matrix() * rec.kernel), opts.tol.tol_rank);
    if (q.negative != rec.index.negative || q.positive != rec.index.positive) return false;
  }
  return true;
}

}  // namespace

DegenerateCrossing::DegenerateCrossing(CrossingRecord record)
    : NumericalFailure(degenerate_message(record), record.lambda_star), record_(std::move(record)) {}

SflReport sfl_partition(const OperatorPath& path, const SflOptions& opts) {
  const int n0 = opts.initial_segments > 0 ? opts.initial_segments : path.smoothness_hint();
  SflReport report;
  report.method = SflMethod::partition;
  PartitionRun run(path, opts);
  report.value = run.run(n0, report.segments);
  report.diagnostics.initial_segments = n0;
  if (opts.verify_doubling) {
    std::vector<WindowSegment> finer;
    const int check = run.run(2 * n0, finer);
    if (check != report.value) {
      std::ostringstream os;
      os << "sfl_partition: value changed under refinement (" << report.value << " vs " << check << ")";
      throw NumericalFailure(os.str());
    }
    report.diagnostics.doubling_checked = true;
  }
  report.diagnostics.evaluations = run.evaluations();
  report.diagnostics.max_depth = run.max_depth();
  return report;
}

SflReport sfl_crossings(const OperatorPath& path, const SflOptions& opts) {
  if (!path.has_deriv()) throw InvalidInput("sfl_crossings: path has no derivative");
  const detail::ScanResult scan = detail::scan_for_roots(eigen_scan(path, opts.tol.tol_rank), scan_options(opts));

  SflReport report;
  report.method = SflMethod::crossings;
  report.diagnostics.evaluations = scan.evaluations;
  for (const detail::Root& root : scan.roots) {
    CrossingRecord rec;
    rec.lambda_star = root.lambda;
    rec.kernel = kernel_at(path, root.lambda, root.threshold);
    if (rec.kernel.cols() == 0) continue;
    rec.form = SymMatrix(rec.kernel.transpose() * path.deriv(root.lambda).matrix() * rec.kernel);
    rec.index = quadform_index(rec.form, opts.tol.tol_rank);
    rec.regular = !rec.index.degenerate() && form_stable(path, rec, opts);
    if (!rec.regular) {
      if (!opts.perturb_degenerate) throw DegenerateCrossing(std::move(rec));
      // Shift the whole path by eps (lambda - 1/2) I and report that answer.
      const double eps = 1e-6 * scale_of(path.eval(0.0));
      const Eigen::Index n = path.dim();
      OperatorPath shifted(
          n, [path, eps, n](double l) { return path.eval(l) + SymMatrix::identity(n) * (eps * (l - 0.5)); },
          [path, eps, n](double l) { return path.deriv(l) + SymMatrix::identity(n) * eps; },
          path.smoothness_hint());
      SflOptions strict = opts;
      strict.perturb_degenerate = false;
      SflReport r = sfl_crossings(shifted, strict);
      // Split roots closer than the merge width are miscounted; the
      // partition method on the same shifted path catches that.
      if (sfl_partition(shifted, strict).value != r.value)
        throw NumericalFailure("perturbation did not resolve the degenerate crossing", rec.lambda_star);
      r.diagnostics.perturbed = true;
      r.diagnostics.perturbation = eps;
      return r;
    }
    report.crossings.push_back(std::move(rec));
  }
  report.value = assemble_crossings(report.crossings);
  return report;
}

std::vector<KernelEvent> locate_kernel_events(const OperatorPath& path, const SflOptions& opts) {
  const detail::ScanResult scan = detail::scan_for_roots(eigen_scan(path, opts.tol.tol_rank), scan_options(opts));
  std::vector<KernelEvent> events;
  for (const detail::Root& root : scan.roots) {
    const Matrix k = kernel_at(path, root.lambda, root.threshold);
    if (k.cols() > 0) events.push_back({root.lambda, static_cast<int>(k.cols())});
  }
  return events;
}

int assemble_crossings(const std::vector<CrossingRecord>& crossings) {
  int value = 0;
  for (const auto& c : crossings) value += c.contribution();
  return value;
}

// ---------------------------------------------------------------------------
// Path algebra

OperatorPath constant_path(const SymMatrix& m) {
  const Eigen::Index n = m.dim();
  return OperatorPath(
      n, [m](double) { return m; }, [n](double) { return SymMatrix::zero(n); }, 8);
}

OperatorPath concatenate(const OperatorPath& p1, const OperatorPath& p2, double tol_orth) {
  if (p1.dim() != p2.dim()) throw InvalidInput("concatenate: dimension mismatch");
  const SymMatrix end = p1.eval(1.0);
  const SymMatrix start = p2.eval(0.0);
  const double scale = std::max(scale_of(end), scale_of(start));
  if (operator_norm((end - start).matrix()) > tol_orth * scale)
    throw InvalidInput("concatenate: endpoint of the first path differs from start of the second");
  OperatorPath::Eval eval = [p1, p2](double l) { return l <= 0.5 ? p1.eval(2.0 * l) : p2.eval(2.0 * l - 1.0); };
  OperatorPath::Eval deriv;
  if (p1.has_deriv() && p2.has_deriv())
    deriv = [p1, p2](double l) { return 2.0 * (l <= 0.5 ? p1.deriv(2.0 * l) : p2.deriv(2.0 * l - 1.0)); };
  return OperatorPath(p1.dim(), std::move(eval), std::move(deriv),
                      p1.smoothness_hint() + p2.smoothness_hint());
}

OperatorPath reverse(const OperatorPath& p) {
  OperatorPath::Eval deriv;
  if (p.has_deriv()) deriv = [p](double l) { return -p.deriv(1.0 - l); };
  return OperatorPath(
      p.dim(), [p](double l) { return p.eval(1.0 - l); }, std::move(deriv), p.smoothness_hint());
}

OperatorPath restrict_path(const OperatorPath& p, double lo, double hi) {
  if (!(0.0 <= lo && lo < hi && hi <= 1.0)) throw InvalidInput("restrict_path: need 0 <= lo < hi <= 1");
  const double w = hi - lo;
  OperatorPath::Eval deriv;
  if (p.has_deriv()) deriv = [p, lo, w](double l) { return w * p.deriv(lo + w * l); };
  return OperatorPath(
      p.dim(), [p, lo, w](double l) { return p.eval(lo + w * l); }, std::move(deriv),
      std::max(8, static_cast<int>(std::ceil(p.smoothness_hint() * w))));
}

OperatorPath add_paths(const OperatorPath& p, const OperatorPath& q) {
  if (p.dim() != q.dim()) throw InvalidInput("add_paths: dimension mismatch");
  OperatorPath::Eval deriv;
  if (p.has_deriv() && q.has_deriv()) deriv = [p, q](double l) { return p.deriv(l) + q.deriv(l); };
  return OperatorPath(
      p.dim(), [p, q](double l) { return p.eval(l) + q.eval(l); }, std::move(deriv),
      std::max(p.smoothness_hint(), q.smoothness_hint()));
}

SymMatrix riesz_transform(const SymMatrix& m) {
  return spectral_map(sym_eig(m), [](double mu) { return mu / std::sqrt(1.0 + mu * mu); });
}

OperatorPath riesz_path(const OperatorPath& p) {
  OperatorPath::Eval deriv;
  if (p.has_deriv()) {
    deriv = [p](double l) {
      const EigDecomp e = sym_eig(p.eval(l));
      const Matrix dv = e.vectors.transpose() * p.deriv(l).matrix() * e.vectors;
      const Eigen::Index n = e.values.size();
      auto f = [](double mu) { return mu / std::sqrt(1.0 + mu * mu); };
      auto df = [](double mu) { return std::pow(1.0 + mu * mu, -1.5); };
      const double close = 1e-8 * scale_of(e);
      Matrix g(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
          const double a = e.values(i), b = e.values(j);
          const double dd = std::abs(a - b) > close ? (f(a) - f(b)) / (a - b) : df(0.5 * (a + b));
          g(i, j) = dd * dv(i, j);
        }
      }
      return SymMatrix(e.vectors * g * e.vectors.transpose());
    };
  }
  return OperatorPath(
      p.dim(), [p](double l) { return riesz_transform(p.eval(l)); }, std::move(deriv), p.smoothness_hint());
}

double normalization_delta(const SymMatrix& t, double tol_rank) {
  const EigDecomp e = sym_eig(t);
  const double thr = tol_rank * scale_of(e);
  double smallest = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < e.values.size(); ++k)
    if (std::abs(e.values(k)) > thr) smallest = std::min(smallest, std::abs(e.values(k)));
  if (!std::isfinite(smallest)) throw InvalidInput("normalization_path: T has no nonzero eigenvalue");
  return 0.5 * smallest;
}

OperatorPath normalization_path(const SymMatrix& t, double tol_rank) {
  const double delta = normalization_delta(t, tol_rank);
  const Eigen::Index n = t.dim();
  return OperatorPath(
      n, [t, delta, n](double l) { return t + SymMatrix::identity(n) * (delta * (2.0 * l - 1.0)); },
      [delta, n](double) { return SymMatrix::identity(n) * (2.0 * delta); }, 16);
}

PathCheck check_path(const OperatorPath& p, int samples) {
  PathCheck out;
  samples = std::max(samples, 2);
  SymMatrix prev = p.eval(0.0);
  for (int k = 1; k <= samples; ++k) {
    const double l = static_cast<double>(k) / samples;
    SymMatrix cur = p.eval(l);
    out.lipschitz = std::max(out.lipschitz, operator_norm((cur - prev).matrix()) * samples);
    prev = std::move(cur);
  }
  if (!p.has_deriv()) return out;
  const double h = 1e-5;
  for (int k = 0; k <= samples; ++k) {
    const double l = std::clamp(static_cast<double>(k) / samples, h, 1.0 - h);
    const SymMatrix plus = p.eval(l + h);
    const SymMatrix minus = p.eval(l - h);
    const SymMatrix mid = p.eval(l);
    const double fd = operator_norm(((plus - minus) * (0.5 / h) - p.deriv(l)).matrix());
    const double curvature = operator_norm((plus + minus - mid * 2.0).matrix()) / (h * h);
    const double allowed = 10.0 * h * std::max(1.0, curvature) + 1e-8 * scale_of(mid);
    out.max_fd_residual = std::max(out.max_fd_residual, fd);
    if (fd > allowed) out.deriv_consistent = false;
  }
  return out;
}

Trajectory eigenvalue_trajectory(const OperatorPath& p, int samples) {
  Trajectory t;
  samples = std::max(samples, 1);
  for (int k = 0; k <= samples; ++k) {
    const double l = static_cast<double>(k) / samples;
    t.lambdas.push_back(l);
    t.values.push_back(sym_eig(p.eval(l)).values);
  }
  return t;
}

}  // namespace sflow
