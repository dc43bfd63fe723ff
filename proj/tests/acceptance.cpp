// Runs the property suites at their default sizes and prints one PASS/FAIL
// line per acceptance criterion. Exit status is 0 only when all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "sflow/generators.hpp"
#include "sflow/hamiltonian.hpp"
#include "sflow/suite.hpp"

using namespace sflow;

namespace {

struct Line {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("FAILED ") + what;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

const RunConfig kConfig = [] {
  RunConfig cfg;
  cfg.seed = 1;
  return cfg;
}();

// Runs a suite and records verdict and instance count.
SuiteReport suite(Line& line, const std::string& name, int min_instances) {
  SuiteReport r = run_suite(name, kConfig);
  line.require(r.verdict(), name + " verdict (" + std::to_string(r.failures.size()) + " failures)");
  line.require(r.instances >= min_instances,
               name + " instances " + std::to_string(r.instances) + " >= " + std::to_string(min_instances));
  line.note(name + ": " + std::to_string(r.instances) + " instances, " + std::to_string(r.skipped) + " skipped, " +
            fmt(r.elapsed_seconds) + " s");
  return r;
}

double stat(const SuiteReport& r, const std::string& key) {
  auto it = r.stats.find(key);
  return it == r.stats.end() ? std::nan("") : it->second;
}

Line criterion1() {
  Line l;
  auto r = suite(l, "method_agreement", 200);
  l.require(r.elapsed_seconds <= 120.0, "runtime <= 120 s");
  return l;
}

Line criterion2() {
  Line l;
  suite(l, "homotopy", 100);
  // Mode coverage: every mode appears among the first instances.
  for (auto mode : {gen::HomotopyMode::free_loop, gen::HomotopyMode::fixed_edge, gen::HomotopyMode::invertible_edge}) {
    auto h = gen::generate_homotopy(1, 3, mode);
    const int left = sfl_partition(h.lambda_path(0.0)).value, right = sfl_partition(h.lambda_path(1.0)).value;
    const int bottom = sfl_partition(h.s_path(0.0)).value, top = sfl_partition(h.s_path(1.0)).value;
    l.require(left == bottom + right - top, gen::to_string(mode) + " homotopy formula");
  }
  return l;
}

Line criterion3() {
  Line l;
  suite(l, "axioms", 60);
  l.require(sfl_partition(gen::np_path()).value == 1, "(NP) value 1");
  return l;
}

Line criterion4() {
  Line l;
  auto g = suite(l, "gap", 1000);
  auto s = suite(l, "gap_scalar", 100);
  const double id_err = stat(g, "max_identity_error"), ratio = stat(g, "max_inequality_ratio"), sc = stat(s, "max_oracle_error");
  l.require(!(id_err > 1e-10), "identity error <= 1e-10");
  l.require(!(sc > 1e-12), "scalar closed form within 1e-12");
  l.note("max identity error " + fmt(id_err) + ", max lhs/rhs " + fmt(ratio) + ", scalar error " + fmt(sc));
  return l;
}

Line criterion5() {
  Line l;
  suite(l, "maslov", 100);
  return l;
}

Line criterion6() {
  Line l;
  suite(l, "hamiltonian_rotation", 1);
  // Direct check against the explicit spectrum k pi + 3 pi lambda.
  auto fam = gen::rotation_family(3.0 * std::numbers::pi, 1000);
  auto rep = hamiltonian_sfl(fam);
  l.require(rep.value == 3, "sfl = 3 (got " + std::to_string(rep.value) + ")");
  const double expect[] = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
  bool set_ok = rep.crossings.size() == 4;
  double err = 0.0;
  for (std::size_t i = 0; set_ok && i < 4; ++i) err = std::max(err, std::abs(rep.crossings[i].lambda_star - expect[i]));
  l.require(set_ok && err <= 1e-6, "crossing set {0, 1/3, 2/3, 1} within 1e-6");
  double drift = 0.0;
  for (double lam : {0.0, 0.25, 0.5, 0.75, 1.0}) drift = std::max(drift, fundamental_solution(fam, lam).symplectic_drift);
  l.require(drift <= 1e-8, "drift <= 1e-8");
  l.note("crossing error " + fmt(err) + ", drift " + fmt(drift));
  return l;
}

Line criterion7() {
  Line l;
  suite(l, "comparison", 200);
  suite(l, "comparison_hamiltonian", 200);
  return l;
}

Line criterion8() {
  Line l;
  auto r = suite(l, "count_bound", 41);
  auto sweep = sweep_nontrivial(gen::rotating_boundary_family(3.0 * std::numbers::pi, 0.2, 1000));
  const bool mu3 = sweep.maslov_pair && std::abs(*sweep.maslov_pair) == 3;
  l.require(mu3, "rotating boundary |mu| = 3");
  l.require(sweep.count >= 3, "rotating boundary N >= 3");
  l.note("rotating boundary N = " + std::to_string(sweep.count) + ", min slack " + fmt(stat(r, "min_count_minus_bound")));
  return l;
}

Line criterion9() {
  Line l;
  suite(l, "riesz", 100);
  return l;
}

Line criterion10() {
  Line l;
  suite(l, "isolated", 100);
  return l;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Line()>>> criteria = {
      {"1 method agreement", criterion1},   {"2 homotopy formula", criterion2},
      {"3 axioms", criterion3},             {"4 gap metric", criterion4},
      {"5 sfl = Maslov", criterion5},       {"6 Hamiltonian rotation", criterion6},
      {"7 comparison", criterion7},         {"8 count bound", criterion8},
      {"9 Riesz invariance", criterion9},   {"10 isolated crossing bound", criterion10},
  };
  bool all = true;
  for (const auto& [name, fn] : criteria) {
    Line line;
    try {
      line = fn();
    } catch (const std::exception& e) {
      line.pass = false;
      line.detail = std::string("exception: ") + e.what();
    }
    all = all && line.pass;
    std::printf("%s criterion %s: %s\n", line.pass ? "PASS" : "FAIL", name, line.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
