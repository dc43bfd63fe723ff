#pragma once

// Spectral flow of paths of symmetric matrices.
//
// Two independent routes are provided: a partition of [0,1] into segments,
// each carrying a spectral window [-a, a] whose boundary no eigenvalue
// touches (the value is the sum over segments of the change in the number
// of eigenvalues in [0, a]), and the crossing-form formula, which locates
// every parameter with nontrivial kernel and sums signatures of the
// derivative restricted to the kernel (Morse-index rules at the endpoints).

#include <functional>
#include <string>
#include <vector>

#include "sflow/numerics.hpp"

namespace sflow {

/// A continuous family lambda -> A(lambda) on [0, 1], optionally with its
/// derivative. Evaluation must be a pure function of lambda.
class OperatorPath {
 public:
  using Eval = std::function<SymMatrix(double)>;

  OperatorPath(Eigen::Index dim, Eval eval, Eval deriv = {}, int smoothness_hint = 64);

  Eigen::Index dim() const { return dim_; }
  bool has_deriv() const { return static_cast<bool>(deriv_); }
  int smoothness_hint() const { return smoothness_hint_; }

  SymMatrix eval(double lambda) const;
  /// Throws InvalidInput when no derivative is attached.
  SymMatrix deriv(double lambda) const;

  const Eval& eval_fn() const { return eval_; }
  const Eval& deriv_fn() const { return deriv_; }

 private:
  Eigen::Index dim_;
  Eval eval_;
  Eval deriv_;
  int smoothness_hint_;
};

struct WindowSegment {
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  double a = 0.0;
  int count_lo = 0;  // eigenvalues in [0, a] at lambda_lo
  int count_hi = 0;  // eigenvalues in [0, a] at lambda_hi
  int depth = 0;     // bisection depth below the initial partition
};

struct CrossingRecord {
  double lambda_star = 0.0;
  Matrix kernel;  // orthonormal columns
  SymMatrix form;
  QuadFormIndex index;
  bool regular = false;

  /// Contribution to the crossing-form sum: -m^-(form) at 0, sgn(form) in
  /// the interior, m^-(-form) at 1.
  int contribution() const;
};

enum class SflMethod { partition, crossings };

std::string to_string(SflMethod m);

struct SflDiagnostics {
  int evaluations = 0;
  int initial_segments = 0;
  int max_depth = 0;
  bool doubling_checked = false;
  bool perturbed = false;  // degenerate crossings were resolved by perturbation
  double perturbation = 0.0;
};

struct SflReport {
  int value = 0;
  SflMethod method = SflMethod::partition;
  std::vector<WindowSegment> segments;
  std::vector<CrossingRecord> crossings;
  SflDiagnostics diagnostics;
};

struct SflOptions {
  Tolerances tol;
  int initial_segments = 0;   // 0: use the path's smoothness hint
  int segment_samples = 4;    // interior samples per segment
  int max_depth = 30;
  double margin = 0.1;        // eigenvalues must stay outside [a(1-margin), a(1+margin)]
  bool verify_doubling = true;
  int scan_samples = 512;
  bool perturb_degenerate = false;
};

/// Raised by the crossing method when a crossing form is degenerate.
class DegenerateCrossing : public NumericalFailure {
 public:
  explicit DegenerateCrossing(CrossingRecord record);
  const CrossingRecord& record() const { return record_; }

 private:
  CrossingRecord record_;
};

SflReport sfl_partition(const OperatorPath& path, const SflOptions& opts = {});
SflReport sfl_crossings(const OperatorPath& path, const SflOptions& opts = {});

/// Parameters in [0, 1] where the path has nontrivial kernel, with the
/// kernel dimension at each. Does not need a derivative.
struct KernelEvent {
  double lambda = 0.0;
  int kernel_dim = 0;
};
std::vector<KernelEvent> locate_kernel_events(const OperatorPath& path, const SflOptions& opts = {});

/// Sum of crossing contributions.
int assemble_crossings(const std::vector<CrossingRecord>& crossings);

// Path algebra.
OperatorPath constant_path(const SymMatrix& m);
/// Two-speed concatenation: first half runs p1, second half runs p2.
OperatorPath concatenate(const OperatorPath& p1, const OperatorPath& p2,
                         double tol_orth = Tolerances{}.tol_orth);
OperatorPath reverse(const OperatorPath& p);
/// The sub-path over [lo, hi], reparametrized to [0, 1].
OperatorPath restrict_path(const OperatorPath& p, double lo, double hi);
/// Pointwise sum of two paths of equal dimension.
OperatorPath add_paths(const OperatorPath& p, const OperatorPath& q);

/// T (I + T^2)^{-1/2}: same eigenvectors, mu -> mu / sqrt(1 + mu^2).
SymMatrix riesz_transform(const SymMatrix& m);
/// lambda -> riesz_transform(eval(lambda)); the derivative is attached
/// (through the first divided differences of the scalar map) when the input
/// path has one.
OperatorPath riesz_path(const OperatorPath& p);

/// T + t I for t in [-delta(T), delta(T)], reparametrized to [0, 1], where
/// delta(T) is half the smallest nonzero |eigenvalue|.
OperatorPath normalization_path(const SymMatrix& t, double tol_rank = Tolerances{}.tol_rank);
double normalization_delta(const SymMatrix& t, double tol_rank = Tolerances{}.tol_rank);

/// Sampled regularity statistics of a path.
struct PathCheck {
  double lipschitz = 0.0;
  double max_fd_residual = 0.0;  // only when a derivative is attached
  bool deriv_consistent = true;
};
PathCheck check_path(const OperatorPath& p, int samples = 64);

/// Sorted eigenvalues at `samples + 1` equally spaced parameters.
struct Trajectory {
  std::vector<double> lambdas;
  std::vector<Vector> values;
};
Trajectory eigenvalue_trajectory(const OperatorPath& p, int samples);

}  // namespace sflow
