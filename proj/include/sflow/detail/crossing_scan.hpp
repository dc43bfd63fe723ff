#pragma once

// Locating the parameters where a one-parameter family degenerates.
//
// The family is described by a nonnegative "distance to degeneracy" m(lambda)
// (smallest |eigenvalue|, smallest principal-angle sine, ...) and optionally a
// vector of continuous signed branches whose sign changes bracket zeros
// exactly. The scan samples m on a uniform grid, subdivides every interval on
// which the Lipschitz estimate admits a zero, then polishes candidates by
// bisection (sign changes) or golden-section search (local minima of m).

#include <functional>
#include <vector>

#include "sflow/numerics.hpp"

namespace sflow::detail {

struct ScanPoint {
  double lambda = 0.0;
  double distance = 0.0;  // m(lambda) >= 0
  double zero_tol = 0.0;  // distances at or below this count as exact zeros
  Vector branches;        // optional signed branches, same size at every point
};

using ScanFunction = std::function<ScanPoint(double)>;

struct ScanOptions {
  int samples = 512;
  double resolution = 1e-10;   // final localization width in lambda
  double min_width = 1e-6;     // refinement stops below this interval width
  double lipschitz_safety = 2.0;
  // Candidates with distance <= zero_tol + slope * resolution * slope_factor
  // are accepted as zeros.
  double accept_slope_factor = 4.0;
  // Number of consecutive refined samples at or below the acceptance
  // threshold that is treated as a continuum of zeros.
  int continuum_run = 3;
};

struct Root {
  double lambda = 0.0;
  double distance = 0.0;
  double threshold = 0.0;  // acceptance threshold used for this root
};

struct ScanResult {
  std::vector<Root> roots;          // ascending, deduplicated
  std::vector<ScanPoint> samples;   // refined scan, ascending in lambda
  double slope = 0.0;               // Lipschitz estimate of m
  int evaluations = 0;
};

/// Throws NumericalFailure when the zero set is not isolated.
ScanResult scan_for_roots(const ScanFunction& f, const ScanOptions& opts);

}  // namespace sflow::detail
