#include "sflow/detail/crossing_scan.hpp"

#include <algorithm>
#include <cmath>

namespace sflow::detail {

namespace {

class Scanner {
 public:
  Scanner(const ScanFunction& f, const ScanOptions& opts) : f_(f), opts_(opts) {}

  ScanResult run() {
    if (opts_.samples < 2) throw InvalidInput("scan: need at least two samples");
    const int n = opts_.samples;
    std::vector<ScanPoint> coarse;
    coarse.reserve(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) coarse.push_back(eval(static_cast<double>(k) / n));

    double slope = 0.0;
    for (std::size_t k = 0; k + 1 < coarse.size(); ++k)
      slope = std::max(slope, std::abs(coarse[k + 1].distance - coarse[k].distance) * n);
    slope_ = opts_.lipschitz_safety * slope;

    result_.samples.push_back(coarse.front());
    for (std::size_t k = 0; k + 1 < coarse.size(); ++k) refine(coarse[k], coarse[k + 1], 0);

    check_continuum();
    collect_roots();
    result_.slope = slope_;
    result_.evaluations = evaluations_;
    return std::move(result_);
  }

 private:
  ScanPoint eval(double lambda) {
    ++evaluations_;
    ScanPoint p = f_(lambda);
    p.lambda = lambda;
    if (!std::isfinite(p.distance)) throw NumericalFailure("scan: non-finite distance", lambda);
    return p;
  }

  double threshold(const ScanPoint& p) const {
    return p.zero_tol + opts_.accept_slope_factor * slope_ * opts_.resolution;
  }

  void refine(const ScanPoint& a, const ScanPoint& b, int depth) {
    const double width = b.lambda - a.lambda;
    const bool zero_possible = a.distance + b.distance <= slope_ * width;
    if (zero_possible && width > opts_.min_width && depth < 64) {
      ScanPoint mid = eval(0.5 * (a.lambda + b.lambda));
      refine(a, mid, depth + 1);
      refine(mid, b, depth + 1);
    } else {
      result_.samples.push_back(b);
    }
  }

  void check_continuum() const {
    int run = 0;
    for (const auto& p : result_.samples) {
      run = (p.distance <= p.zero_tol) ? run + 1 : 0;
      if (run >= opts_.continuum_run)
        throw NumericalFailure("scan: degeneracy persists on an interval (non-isolated zeros)",
                               p.lambda);
    }
  }

  ScanPoint bisect_branch(ScanPoint lo, ScanPoint hi, Eigen::Index j) {
    while (hi.lambda - lo.lambda > opts_.resolution) {
      ScanPoint mid = eval(0.5 * (lo.lambda + hi.lambda));
      if (mid.branches(j) == 0.0) return mid;
      if ((mid.branches(j) < 0.0) == (lo.branches(j) < 0.0))
        lo = std::move(mid);
      else
        hi = std::move(mid);
    }
    return eval(0.5 * (lo.lambda + hi.lambda));
  }

  ScanPoint golden(double a, double b, const ScanPoint& seed) {
    constexpr double kInvPhi = 0.6180339887498949;
    ScanPoint best = seed;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    ScanPoint pc = eval(c);
    ScanPoint pd = eval(d);
    while (b - a > opts_.resolution) {
      if (pc.distance <= pd.distance) {
        b = d;
        pd = pc;
        d = c;
        c = b - kInvPhi * (b - a);
        pc = eval(c);
      } else {
        a = c;
        pc = pd;
        c = d;
        d = a + kInvPhi * (b - a);
        pd = eval(d);
      }
      if (pc.distance < best.distance) best = pc;
      if (pd.distance < best.distance) best = pd;
    }
    return best;
  }

  void consider(ScanPoint p) {
    if (p.lambda < opts_.resolution && p.lambda != 0.0) p = eval(0.0);
    if (p.lambda > 1.0 - opts_.resolution && p.lambda != 1.0) p = eval(1.0);
    if (p.distance <= threshold(p)) candidates_.push_back({p.lambda, p.distance, threshold(p)});
  }

  void collect_roots() {
    const auto& s = result_.samples;
    const std::size_t n = s.size();
    for (std::size_t k = 0; k + 1 < n; ++k) {
      for (Eigen::Index j = 0; j < s[k].branches.size(); ++j) {
        const double u = s[k].branches(j);
        const double v = s[k + 1].branches(j);
        if ((u < 0.0 && v > 0.0) || (u > 0.0 && v < 0.0)) consider(bisect_branch(s[k], s[k + 1], j));
      }
    }
    for (std::size_t k = 0; k < n; ++k) {
      const bool left_ok = (k == 0) || s[k].distance <= s[k - 1].distance;
      const bool right_ok = (k + 1 == n) || s[k].distance <= s[k + 1].distance;
      if (!left_ok || !right_ok) continue;
      const double a = s[k == 0 ? 0 : k - 1].lambda;
      const double b = s[k + 1 == n ? k : k + 1].lambda;
      if (s[k].distance > slope_ * (b - a) && s[k].distance > threshold(s[k])) continue;
      if (s[k].distance == 0.0 || b - a <= opts_.resolution)
        consider(s[k]);
      else
        consider(golden(a, b, s[k]));
    }

    std::sort(candidates_.begin(), candidates_.end(),
              [](const Root& x, const Root& y) { return x.lambda < y.lambda; });
    const double merge = 100.0 * opts_.resolution;
    for (const auto& c : candidates_) {
      if (!result_.roots.empty() && c.lambda - result_.roots.back().lambda <= merge) {
        if (c.distance < result_.roots.back().distance) result_.roots.back() = c;
        continue;
      }
      result_.roots.push_back(c);
    }
  }

  const ScanFunction& f_;
  ScanOptions opts_;
  double slope_ = 0.0;
  int evaluations_ = 0;
  ScanResult result_;
  std::vector<Root> candidates_;
};

}  // namespace

ScanResult scan_for_roots(const ScanFunction& f, const ScanOptions& opts) {
  return Scanner(f, opts).run();
}

}  // namespace sflow::detail
