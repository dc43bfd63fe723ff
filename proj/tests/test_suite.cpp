#include <doctest.h>

#include <set>

#include "sflow/generators.hpp"
#include "sflow/spec_io.hpp"
#include "sflow/suite.hpp"

using namespace sflow;
using nlohmann::json;

namespace {

RunConfig small_config(int samples) {
  RunConfig cfg;
  cfg.seed = 3;
  cfg.samples = SampleCounts::uniform(samples);
  cfg.dims = {1, 2, 3};
  cfg.random_grid = 100;
  return cfg;
}

}  // namespace

TEST_CASE("generators are pure functions of their seed") {
  auto a = gen::generate_operator_path(42, 4, 3), b = gen::generate_operator_path(42, 4, 3);
  auto c = gen::generate_operator_path(43, 4, 3);
  for (double l : {0.0, 0.3, 0.9}) {
    CHECK(a.eval(l).matrix() == b.eval(l).matrix());
    CHECK(a.deriv(l).matrix() == b.deriv(l).matrix());
  }
  CHECK(a.eval(0.3).matrix() != c.eval(0.3).matrix());
  CHECK(gen::mix_seed(1, 2) != gen::mix_seed(2, 1));
  CHECK(gen::mix_seed(1, 2) == gen::mix_seed(1, 2));

  gen::Rng r1(9), r2(9);
  for (int i = 0; i < 100; ++i) {
    const double u = r1.uniform();
    CHECK(u == r2.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  gen::Rng r3(1);
  std::set<int> seen;
  for (int i = 0; i < 200; ++i) seen.insert(r3.integer(2, 5));
  CHECK(seen == std::set<int>{2, 3, 4, 5});
}

TEST_CASE("generated psd and orthogonal matrices") {
  gen::Rng rng(15);
  for (int k = 0; k < 30; ++k) {
    const int n = 1 + k % 6;
    const int rank = k % (n + 1);
    auto e = sym_eig(SymMatrix(gen::random_psd(rng, n, rank)));
    CHECK(e.values.minCoeff() >= -1e-12);
    int nonzero = 0;
    for (int i = 0; i < n; ++i) nonzero += e.values(i) > 1e-9;
    CHECK(nonzero == rank);
    Matrix q = gen::random_orthogonal(rng, n);
    CHECK((q.transpose() * q - Matrix::Identity(n, n)).norm() < 1e-12);
  }
}

TEST_CASE("single crossing generator") {
  for (int k = 0; k < 10; ++k) {
    const int dim = 2 + k % 4, kd = 1 + k % dim;
    auto p = gen::single_crossing_path(60 + k, dim, kd, 0.4);
    auto ev = locate_kernel_events(p);
    REQUIRE(ev.size() == 1);
    CHECK(std::abs(ev[0].lambda - 0.4) < 1e-8);
    CHECK(ev[0].kernel_dim == kd);
  }
}

TEST_CASE("every suite passes on a small configuration") {
  const auto cfg = small_config(4);
  for (const auto& name : suite_names()) {
    auto r = run_suite(name, cfg);
    INFO(name, " ", io::dump(to_json(r)));
    CHECK(r.verdict());
    CHECK(r.instances > 0);
  }
}

TEST_CASE("axiom suite contains the fixed (NP) instance") {
  RunConfig cfg = small_config(0);
  cfg.suites = {"axioms"};
  auto rep = run_axiom_suite(cfg);
  REQUIRE(rep.suites.size() == 1);
  CHECK(rep.suites[0].instances >= 1);
  CHECK(rep.verdict());
  CHECK(gen::np_path().eval(0.5).dim() == 3);
  CHECK(sfl_partition(gen::np_path()).value == 1);
}

TEST_CASE("sign-flipped spectral flow is caught and replays") {
  RunConfig cfg = small_config(6);
  SuiteHooks flipped;
  flipped.sfl = [](const OperatorPath& p) { return -sfl_partition(p).value; };

  auto bad = run_suite("axioms", cfg, flipped);
  CHECK_FALSE(bad.verdict());
  auto j = to_json(bad);
  REQUIRE(j.contains("minimal_counterexample"));
  const auto& minimal = j["minimal_counterexample"];
  for (const auto& f : bad.failures) {
    const auto a = std::make_pair(minimal["instance"]["dim"].get<int>(), minimal["instance"]["index"].get<int>());
    const auto b = std::make_pair(f["instance"]["dim"].get<int>(), f["instance"]["index"].get<int>());
    CHECK(a <= b);
  }

  for (const auto& f : bad.failures) {
    CHECK(replay_failure(f, cfg, flipped));
    CHECK_FALSE(replay_failure(f, cfg));
    // The serialized record alone is enough.
    CHECK(replay_failure(io::parse_json(io::dump(f)), cfg, flipped));
  }

  auto agreement = run_suite("method_agreement", cfg, flipped);
  CHECK_FALSE(agreement.verdict());
}

TEST_CASE("identical seeds give byte-identical reports") {
  RunConfig cfg = small_config(5);
  cfg.suites = {"method_agreement", "gap", "maslov", "axioms"};
  const auto a = io::dump(to_json(run_axiom_suite(cfg)));
  const auto b = io::dump(to_json(run_axiom_suite(cfg)));
  CHECK(a == b);
  cfg.seed = 4;
  CHECK(io::dump(to_json(run_axiom_suite(cfg))) != a);
}

TEST_CASE("unknown suites are rejected") {
  CHECK_THROWS_AS(run_suite("nope", small_config(1)), InvalidInput);
  json bogus = {{"instance", {{"suite", "nope"}, {"index", 0}, {"seed", 1}, {"dim", 1}, {"variant", 0}}}};
  CHECK_THROWS_AS(replay_failure(bogus, small_config(1)), InvalidInput);
}
