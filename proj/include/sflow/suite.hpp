#pragma once

// Property suite over seeded random instances. Every instance is identified
// by a small JSON key (suite, index, seed, dim, variant) from which the
// check is rebuilt, so failures can be replayed.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "sflow/specflow.hpp"

namespace sflow {

struct SampleCounts {
  int method_agreement = 200;
  int homotopy = 100;
  int axioms = 60;
  int gap = 1000;
  int gap_scalar = 100;
  int maslov = 100;
  int comparison = 200;
  int comparison_hamiltonian = 200;
  int count_bound = 40;
  int riesz = 100;
  int isolated = 100;

  /// Same count for every randomized suite.
  static SampleCounts uniform(int n);
};

struct RunConfig {
  std::uint64_t seed = 1;
  std::vector<int> dims;  // empty: 1..10, capped per suite
  SampleCounts samples;
  Tolerances tol;
  int grid = 1000;           // time steps for the fixed Hamiltonian instances
  int random_grid = 200;     // time steps for randomized Hamiltonian instances
  std::string output_dir;
  std::vector<std::string> suites;  // empty: all
};

nlohmann::json to_json(const RunConfig& cfg);

struct SuiteReport {
  std::string name;
  int instances = 0;
  int skipped = 0;  // instances outside the hypotheses of the check (e.g. degenerate crossings)
  std::vector<nlohmann::json> failures;
  std::map<std::string, double> stats;
  double elapsed_seconds = 0.0;  // not serialized

  bool verdict() const { return failures.empty(); }
};

nlohmann::json to_json(const SuiteReport& r);

struct AxiomReport {
  std::vector<SuiteReport> suites;
  bool verdict() const;
};

nlohmann::json to_json(const AxiomReport& r);

/// Spectral flow used by the suite wherever a path is evaluated by "the"
/// implementation; replaceable for mutation testing.
using SflFunction = std::function<int(const OperatorPath&)>;

struct SuiteHooks {
  SflFunction sfl;  // default: sfl_partition
};

const std::vector<std::string>& suite_names();

SuiteReport run_suite(const std::string& name, const RunConfig& cfg, const SuiteHooks& hooks = {});
AxiomReport run_axiom_suite(const RunConfig& cfg, const SuiteHooks& hooks = {});

/// Re-runs the instance recorded in a failure. Returns true when the check
/// fails again.
bool replay_failure(const nlohmann::json& failure, const RunConfig& cfg, const SuiteHooks& hooks = {});

}  // namespace sflow
