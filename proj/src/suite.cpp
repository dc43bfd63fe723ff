#include "sflow/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "sflow/gapmetric.hpp"
#include "sflow/generators.hpp"
#include "sflow/hamiltonian.hpp"
#include "sflow/maslov.hpp"

namespace sflow {

using nlohmann::json;

SampleCounts SampleCounts::uniform(int n) {
  SampleCounts s;
  s.method_agreement = s.homotopy = s.axioms = s.gap = s.gap_scalar = s.maslov = s.comparison =
      s.comparison_hamiltonian = s.count_bound = s.riesz = s.isolated = n;
  return s;
}

json to_json(const RunConfig& cfg) {
  const SampleCounts& s = cfg.samples;
  return json{{"seed", cfg.seed},
              {"dims", cfg.dims},
              {"samples",
               {{"method_agreement", s.method_agreement},
                {"homotopy", s.homotopy},
                {"axioms", s.axioms},
                {"gap", s.gap},
                {"gap_scalar", s.gap_scalar},
                {"maslov", s.maslov},
                {"comparison", s.comparison},
                {"comparison_hamiltonian", s.comparison_hamiltonian},
                {"count_bound", s.count_bound},
                {"riesz", s.riesz},
                {"isolated", s.isolated}}},
              {"tolerances",
               {{"tol_rank", cfg.tol.tol_rank}, {"tol_orth", cfg.tol.tol_orth}, {"lambda_res", cfg.tol.lambda_res}}},
              {"grid", cfg.grid},
              {"random_grid", cfg.random_grid},
              {"suites", cfg.suites}};
}

json to_json(const SuiteReport& r) {
  json stats = json::object();
  for (const auto& [k, v] : r.stats) stats[k] = v;
  json out{{"suite", r.name},
           {"instances", r.instances},
           {"skipped", r.skipped},
           {"failures", r.failures},
           {"stats", stats},
           {"verdict", r.verdict() ? "pass" : "fail"}};
  if (!r.failures.empty()) {
    // Smallest dimension, then earliest index.
    const auto it = std::min_element(r.failures.begin(), r.failures.end(), [](const json& a, const json& b) {
      const auto ka = std::make_pair(a["instance"]["dim"].get<int>(), a["instance"]["index"].get<int>());
      const auto kb = std::make_pair(b["instance"]["dim"].get<int>(), b["instance"]["index"].get<int>());
      return ka < kb;
    });
    out["minimal_counterexample"] = *it;
  }
  return out;
}

bool AxiomReport::verdict() const {
  return std::all_of(suites.begin(), suites.end(), [](const SuiteReport& s) { return s.verdict(); });
}

json to_json(const AxiomReport& r) {
  json suites = json::array();
  for (const auto& s : r.suites) suites.push_back(to_json(s));
  return json{{"suites", suites}, {"verdict", r.verdict() ? "pass" : "fail"}};
}

namespace {

constexpr double kPi = std::numbers::pi;

struct Key {
  std::string suite;
  int index = 0;
  std::uint64_t seed = 0;
  int dim = 1;
  int variant = 0;

  json to_json() const {
    return json{{"suite", suite}, {"index", index}, {"seed", seed}, {"dim", dim}, {"variant", variant}};
  }
  static Key from_json(const json& j) {
    Key k;
    k.suite = j.at("suite").get<std::string>();
    k.index = j.at("index").get<int>();
    k.seed = j.at("seed").get<std::uint64_t>();
    k.dim = j.at("dim").get<int>();
    k.variant = j.at("variant").get<int>();
    return k;
  }
};

struct Outcome {
  bool ok = true;
  bool skipped = false;
  json detail = json::object();
  std::map<std::string, double> stats;  // "max_*" and "min_*" reduce accordingly, others add

  void max(const std::string& k, double v) {
    auto [it, inserted] = stats.emplace("max_" + k, v);
    if (!inserted) it->second = std::max(it->second, v);
  }
  void min(const std::string& k, double v) {
    auto [it, inserted] = stats.emplace("min_" + k, v);
    if (!inserted) it->second = std::min(it->second, v);
  }
  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail["violated"].push_back(what);
    }
  }
};

struct Ctx {
  const RunConfig& cfg;
  SflFunction sfl;
  SflOptions sopts;
  HamiltonianOptions hopts;        // fixed instances
  HamiltonianOptions hopts_random; // randomized instances
};

using Check = Outcome (*)(const Ctx&, const Key&);

struct SuiteDef {
  std::string name;
  int (*count)(const RunConfig&);
  int min_dim;
  int max_dim;
  int variants;
  Check check;
};

double localization_residual(const OperatorPath& p, const SflReport& r) {
  double worst = 0.0;
  for (const auto& c : r.crossings) {
    const EigDecomp e = sym_eig(p.eval(c.lambda_star));
    worst = std::max(worst, e.values.cwiseAbs().minCoeff() / scale_of(e));
  }
  return worst;
}

// ---- checks ----------------------------------------------------------------

Outcome check_method_agreement(const Ctx& ctx, const Key& key) {
  Outcome o;
  gen::Rng rng(key.seed);
  const int budget = rng.integer(0, 4);
  const OperatorPath p = gen::generate_operator_path(rng.bits(), key.dim, budget);
  const int a = ctx.sfl(p);
  const SflReport r = sfl_crossings(p, ctx.sopts);
  o.detail["budget"] = budget;
  o.detail["partition"] = a;
  o.detail["crossings"] = r.value;
  o.expect(a == r.value, "sfl_partition == sfl_crossings");
  o.max("localization_residual", localization_residual(p, r));
  o.stats["crossings_found"] = static_cast<double>(r.crossings.size());
  return o;
}

Outcome check_homotopy(const Ctx& ctx, const Key& key) {
  Outcome o;
  gen::Rng rng(key.seed);
  const auto mode = static_cast<gen::HomotopyMode>(key.variant);
  const gen::TrigFamily h = gen::generate_homotopy(rng.bits(), key.dim, mode);
  const int l0 = ctx.sfl(h.lambda_path(0.0));
  const int l1 = ctx.sfl(h.lambda_path(1.0));
  const int s0 = ctx.sfl(h.s_path(0.0));
  const int s1 = ctx.sfl(h.s_path(1.0));
  o.detail["mode"] = gen::to_string(mode);
  o.detail["sfl"] = {{"h(0,.)", l0}, {"h(1,.)", l1}, {"h(.,0)", s0}, {"h(.,1)", s1}};
  o.expect(l0 == s0 + l1 - s1, "sfl(h(0,.)) = sfl(h(.,0)) + sfl(h(1,.)) - sfl(h(.,1))");
  switch (mode) {
    case gen::HomotopyMode::fixed_edge:
    case gen::HomotopyMode::invertible_edge:
      o.expect(s0 == 0 && s1 == 0, "edge paths have zero spectral flow");
      o.expect(l0 == l1, "sfl(h(0,.)) = sfl(h(1,.))");
      break;
    case gen::HomotopyMode::free_loop:
      o.expect(s0 == s1, "identical edge paths agree");
      o.expect(l0 == l1, "sfl(h(0,.)) = sfl(h(1,.)) for free loops");
      break;
    case gen::HomotopyMode::generic: break;
  }
  o.stats["nonzero_edges"] = (l0 != 0) + (l1 != 0) + (s0 != 0) + (s1 != 0);
  return o;
}

Outcome check_axioms(const Ctx& ctx, const Key& key) {
  Outcome o;
  gen::Rng rng(key.seed);
  const Eigen::Index dim = key.dim;
  switch (key.variant) {
    case 100: {
      const int v = ctx.sfl(gen::np_path());
      o.detail["property"] = "NP";
      o.detail["value"] = v;
      o.expect(v == 1, "sfl(A^NP) = 1");
      break;
    }
    case 101: {
      const OperatorPath np = gen::np_path();
      const int v = ctx.sfl(concatenate(restrict_path(np, 0.0, 0.3), restrict_path(np, 0.3, 1.0)));
      o.detail["property"] = "NP split at 0.3 and concatenated";
      o.detail["value"] = v;
      o.expect(v == 1, "sfl = 1");
      break;
    }
    case 102: {
      const int v = ctx.sfl(reverse(gen::np_path()));
      o.detail["property"] = "reverse of NP";
      o.detail["value"] = v;
      o.expect(v == -1, "sfl = -1");
      break;
    }
    case 0: {  // (C)
      const OperatorPath p = gen::generate_operator_path(rng.bits(), dim, rng.integer(0, 4));
      const double c = rng.uniform(0.2, 0.8);
      const OperatorPath p1 = restrict_path(p, 0.0, c), p2 = restrict_path(p, c, 1.0);
      const int whole = ctx.sfl(p), a = ctx.sfl(p1), b = ctx.sfl(p2), joined = ctx.sfl(concatenate(p1, p2));
      o.detail["property"] = "C";
      o.detail["split"] = c;
      o.detail["values"] = {whole, a, b, joined};
      o.expect(a + b == whole, "sfl(p|[0,c]) + sfl(p|[c,1]) = sfl(p)");
      o.expect(joined == a + b, "sfl(p1 * p2) = sfl(p1) + sfl(p2)");
      break;
    }
    case 1: {  // (Z)
      const OperatorPath p = gen::generate_operator_path(rng.bits(), dim, 0);
      double gap = 1e300;
      for (int k = 0; k <= 256; ++k) gap = std::min(gap, sym_eig(p.eval(k / 256.0)).values.cwiseAbs().minCoeff());
      const int v = ctx.sfl(p);
      o.detail["property"] = "Z";
      o.detail["value"] = v;
      o.detail["min_abs_eigenvalue"] = gap;
      o.expect(gap > 0.0, "path is invertible on samples");
      o.expect(v == 0, "sfl = 0 on invertible paths");
      break;
    }
    case 2: {  // constant kernel
      const int k = rng.integer(0, static_cast<int>(dim));
      const int v = ctx.sfl(gen::constant_kernel_path(rng.bits(), dim, k));
      o.detail["property"] = "constant kernel";
      o.detail["kernel_dim"] = k;
      o.detail["value"] = v;
      o.expect(v == 0, "sfl = 0 when dim ker is constant");
      break;
    }
    case 3: {  // (N)
      const Eigen::Index d = std::max<Eigen::Index>(dim, 2);
      const int k = rng.integer(0, static_cast<int>(d) - 1);
      const SymMatrix t = gen::random_with_kernel(rng.bits(), d, k);
      const OperatorPath p = normalization_path(t, ctx.sopts.tol.tol_rank);
      const int full = ctx.sfl(p), half = ctx.sfl(restrict_path(p, 0.5, 1.0));
      o.detail["property"] = "N";
      o.detail["kernel_dim"] = k;
      o.detail["values"] = {full, half};
      o.expect(full == k, "sfl(normalization path) = dim ker T");
      o.expect(half == 0, "sfl(half path) = 0");
      break;
    }
    case 4: {  // reversal
      const OperatorPath p = gen::generate_operator_path(rng.bits(), dim, rng.integer(0, 4));
      const int v = ctx.sfl(p), r = ctx.sfl(reverse(p));
      o.detail["property"] = "reversal";
      o.detail["values"] = {v, r};
      o.expect(r == -v, "sfl(reverse p) = -sfl(p)");
      break;
    }
    case 5: {  // loops under loop perturbations
      const gen::TrigFamily a = gen::generate_homotopy(rng.bits(), dim, gen::HomotopyMode::free_loop);
      const gen::TrigFamily k = gen::generate_homotopy(rng.bits(), dim, gen::HomotopyMode::free_loop);
      const double sa = rng.uniform(0.0, 1.0), sk = rng.uniform(0.0, 1.0), scale = rng.uniform(0.0, 1.0);
      const OperatorPath loop = a.lambda_path(sa);
      const OperatorPath pert = k.lambda_path(sk);
      const OperatorPath sum(
          dim, [loop, pert, scale](double l) { return loop.eval(l) + pert.eval(l) * scale; }, {}, 64);
      const int v = ctx.sfl(loop), w = ctx.sfl(sum);
      o.detail["property"] = "loop perturbation";
      o.detail["values"] = {v, w};
      o.expect(v == w, "sfl(A + K) = sfl(A) for loops");
      break;
    }
    default: throw InvalidInput("axioms: unknown variant");
  }
  return o;
}

SymMatrix random_sym(gen::Rng& rng, Eigen::Index dim, double scale) {
  return SymMatrix(gen::random_symmetric(rng, dim, scale));
}

Outcome check_gap(const Ctx&, const Key& key) {
  Outcome o;
  gen::Rng rng(key.seed);
  const Eigen::Index dim = key.dim;
  const SymMatrix t = random_sym(rng, dim, rng.uniform(0.1, 5.0));
  const SymMatrix s = random_sym(rng, dim, rng.uniform(0.1, 5.0));
  const SymMatrix r = random_sym(rng, dim, rng.uniform(0.1, 5.0));
  const SymMatrix a = random_sym(rng, dim, rng.uniform(0.0, 2.0));
  const SymMatrix b = random_sym(rng, dim, rng.uniform(0.0, 2.0));

  const double dts = gap_distance(t, s), dst = gap_distance(s, t);
  const double identity_err = std::abs(std::max(gap_delta(t, s), gap_delta(s, t)) - dts);
  o.expect(identity_err <= 1e-10, "max(delta(T,S), delta(S,T)) = d_G(T,S)");
  o.expect(dts == dst, "symmetry");
  o.expect(dts <= 1.0 + 1e-12, "d_G <= 1");
  const double dtr = gap_distance(t, r), dsr = gap_distance(s, r);
  o.expect(dtr <= dts + dsr + 1e-10, "triangle inequality");
  const PerturbationCheck pc = perturbation_inequality_check(t, s, a, b);
  o.expect(pc.holds, "perturbation inequality");
  o.max("identity_error", identity_err);
  o.max("inequality_ratio", pc.ratio());
  o.min("inequality_slack", pc.slack);
  if (key.variant == 0) {
    // d_G(M + 2^-k E, M) -> 0.
    const SymMatrix e = random_sym(rng, dim, 1.0);
    double last = 1.0;
    for (int k = 0; k <= 30; k += 5) last = gap_distance(t + e * std::ldexp(1.0, -k), t);
    o.expect(last <= 1e-8, "d_G(M_k, M) -> 0");
    o.max("continuity_tail", last);
  }
  if (!o.ok) o.detail = {{"lhs", pc.lhs}, {"rhs", pc.rhs}, {"identity_error", identity_err}, {"violated", o.detail["violated"]}};
  return o;
}

Outcome check_gap_scalar(const Ctx&, const Key& key) {
  Outcome o;
  gen::Rng rng(key.seed);
  const double t = std::tan(rng.uniform(-1.55, 1.55)), s = std::tan(rng.uniform(-1.55, 1.55));
  const double d = gap_distance(SymMatrix(Matrix::Constant(1, 1, t)), SymMatrix(Matrix::Constant(1, 1, s)));
  const double oracle = std::abs(std::sin(std::atan(t) - std::atan(s)));
  const double err = std::abs(d - oracle);
  o.expect(err <= 1e-12, "d_G(t, s) = |sin(atan t - atan s)|");
  o.max("oracle_error", err);
  o.detail = {{"t", t}, {"s", s}, {"d_G", d}, {"oracle", oracle}};
  return o;
}

Outcome check_maslov(const Ctx& ctx, const Key& key) {
  Outcome o;
  gen::Rng rng(key.seed);
  const OperatorPath p = gen::generate_operator_path(rng.bits(), key.dim, rng.integer(0, 3));
  MaslovOptions mo;
  mo.tol = ctx.sopts.tol;
  const int m = sfl_via_maslov(p, mo);
  const int c = sfl_crossings(p, ctx.sopts).value;
  const int s = ctx.sfl(p);
  o.detail["values"] = {{"maslov", m}, {"crossings", c}, {"partition", s}};
  o.expect(m == c && c == s, "sfl_via_maslov = sfl_crossings = sfl_partition");

  const int k = key.dim >= 2 ? rng.integer(0, key.dim - 1) : 0;
  const SymMatrix t = gen::random_with_kernel(rng.bits(), std::max(key.dim, 2), k);
  const LagrangianFrame g = graph_lagrangian(t);
  o.expect(is_lagrangian(g.frame()), "graph is Lagrangian");
  o.expect(intersection_dim(g, horizontal_lagrangian(t.dim())) == k, "dim(gra(T) ∩ Λ0) = dim ker T");
  return o;
}

Outcome check_rotation(const Ctx& ctx, const Key&) {
  Outcome o;
  const HamiltonianFamily fam = gen::rotation_family(3.0 * kPi, ctx.cfg.grid);
  const SflReport r = hamiltonian_sfl(fam, ctx.hopts);
  const double expected[] = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
  json lambdas = json::array();
  for (const auto& c : r.crossings) lambdas.push_back(c.lambda_star);
  o.detail["sfl"] = r.value;
  o.detail["crossings"] = lambdas;
  o.expect(r.value == 3, "sfl = 3");
  bool match = r.crossings.size() == 4;
  double worst = 0.0;
  for (std::size_t i = 0; match && i < 4; ++i) worst = std::max(worst, std::abs(r.crossings[i].lambda_star - expected[i]));
  match = match && worst <= 1e-6;
  o.expect(match, "crossings at {0, 1/3, 2/3, 1} within 1e-6");
  double drift = 0.0;
  for (double l : {0.0, 0.5, 1.0}) drift = std::max(drift, fundamental_solution(fam, l, ctx.hopts).symplectic_drift);
  o.detail["drift"] = drift;
  o.expect(drift <= 1e-8, "symplectic drift <= 1e-8");
  o.max("crossing_error", worst);
  o.max("symplectic_drift", drift);
  return o;
}

Outcome check_comparison(const Ctx& ctx, const Key& key) {
  Outcome o;
  const gen::MatrixComparisonInstance inst = gen::matrix_comparison_instance(key.seed, key.dim);
  const ComparisonResult r = comparison_check(inst.a, inst.k, inst.k_prime, ctx.sopts);
  o.detail = {{"sfl_k", r.sfl_k}, {"sfl_k_prime", r.sfl_k_prime}};
  o.expect(r.holds, "sfl(A + K) >= sfl(A + K')");
  o.stats["strict"] = r.sfl_k > r.sfl_k_prime ? 1.0 : 0.0;
  return o;
}

Outcome check_comparison_hamiltonian(const Ctx& ctx, const Key& key) {
  Outcome o;
  const Eigen::Index n = key.variant == 3 ? 2 : 1;
  const gen::HamiltonianComparisonInstance inst =
      gen::hamiltonian_comparison_instance(key.seed, n, ctx.cfg.random_grid);
  try {
    const ComparisonResult r =
        comparison_check(inst.base, inst.k, inst.k_deriv, inst.k_prime, inst.k_prime_deriv, ctx.hopts_random);
    o.detail = {{"n", n}, {"sfl_k", r.sfl_k}, {"sfl_k_prime", r.sfl_k_prime}};
    o.expect(r.holds, "sfl(A + K) >= sfl(A + K')");
    o.stats["strict"] = r.sfl_k > r.sfl_k_prime ? 1.0 : 0.0;
  } catch (const DegenerateCrossing&) {
    o.skipped = true;
  }
  return o;
}

Outcome check_count_bound(const Ctx& ctx, const Key& key) {
  Outcome o;
  if (key.variant == 100) {
    const HamiltonianFamily fam = gen::rotating_boundary_family(3.0 * kPi, 0.2, ctx.cfg.grid);
    const SweepReport s = sweep_nontrivial(fam, ctx.hopts);
    o.detail = {{"instance", "rotating boundary, total turn 3 pi"}, {"count", s.count}};
    if (s.maslov_pair) o.detail["maslov_pair"] = *s.maslov_pair;
    o.expect(s.maslov_pair && std::abs(*s.maslov_pair) == 3, "|mu(Lambda1, Lambda2)| = 3");
    o.expect(s.count >= 3, "N >= 3");
    return o;
  }
  try {
    const gen::CountBoundInstance inst = gen::count_bound_instance(key.seed, ctx.cfg.random_grid, ctx.hopts_random.maslov);
    const SweepReport s = sweep_nontrivial(inst.family, ctx.hopts_random);
    const int bound = static_cast<int>((std::abs(inst.maslov_pair) + inst.family.n() - 1) / inst.family.n());
    o.detail = {{"n", inst.family.n()}, {"maslov_pair", inst.maslov_pair}, {"count", s.count}, {"bound", bound}};
    o.expect(s.count >= bound, "N >= ceil(|mu| / n)");
    o.min("count_minus_bound", s.count - bound);
  } catch (const DegenerateCrossing&) {
    o.skipped = true;
  }
  return o;
}

Outcome check_riesz(const Ctx& ctx, const Key& key) {
  Outcome o;
  gen::Rng rng(key.seed);
  const OperatorPath p = gen::generate_operator_path(rng.bits(), key.dim, rng.integer(0, 4));
  const OperatorPath f = riesz_path(p);
  const int a = ctx.sfl(p), b = ctx.sfl(f);
  const int c = sfl_crossings(p, ctx.sopts).value, d = sfl_crossings(f, ctx.sopts).value;
  o.detail["values"] = {a, b, c, d};
  o.expect(a == b, "sfl(F(A)) = sfl(A)");
  o.expect(c == d, "crossing forms agree on F(A) and A");
  return o;
}

Outcome check_isolated(const Ctx& ctx, const Key& key) {
  Outcome o;
  gen::Rng rng(key.seed);
  const int k = rng.integer(1, key.dim);
  const double ls = rng.uniform(0.2, 0.8);
  const OperatorPath p = gen::single_crossing_path(rng.bits(), key.dim, k, ls);
  const IsolatedBound b = isolated_bound_check(p, ls, ctx.sopts);
  o.detail = {{"lambda_star", ls}, {"kernel_dim", b.kernel_dim}, {"sfl_abs", b.sfl_abs}, {"expected_kernel_dim", k}};
  o.expect(b.kernel_dim == k, "kernel dimension at the crossing");
  o.expect(b.holds, "|sfl| <= dim ker");
  return o;
}

int count_of(const RunConfig& c, int SampleCounts::*field) { return c.samples.*field; }

const std::vector<SuiteDef>& registry() {
  static const std::vector<SuiteDef> defs = {
      {"method_agreement", [](const RunConfig& c) { return count_of(c, &SampleCounts::method_agreement); }, 1, 10, 1,
       check_method_agreement},
      {"homotopy", [](const RunConfig& c) { return count_of(c, &SampleCounts::homotopy); }, 1, 8, 4, check_homotopy},
      {"axioms", [](const RunConfig& c) { return count_of(c, &SampleCounts::axioms); }, 1, 10, 6, check_axioms},
      {"gap", [](const RunConfig& c) { return count_of(c, &SampleCounts::gap); }, 1, 8, 10, check_gap},
      {"gap_scalar", [](const RunConfig& c) { return count_of(c, &SampleCounts::gap_scalar); }, 1, 1, 1,
       check_gap_scalar},
      {"maslov", [](const RunConfig& c) { return count_of(c, &SampleCounts::maslov); }, 1, 6, 1, check_maslov},
      {"hamiltonian_rotation", [](const RunConfig&) { return 1; }, 1, 1, 1, check_rotation},
      {"comparison", [](const RunConfig& c) { return count_of(c, &SampleCounts::comparison); }, 1, 10, 1,
       check_comparison},
      {"comparison_hamiltonian",
       [](const RunConfig& c) { return count_of(c, &SampleCounts::comparison_hamiltonian); }, 1, 1, 4,
       check_comparison_hamiltonian},
      {"count_bound", [](const RunConfig& c) { return count_of(c, &SampleCounts::count_bound); }, 1, 1, 1,
       check_count_bound},
      {"riesz", [](const RunConfig& c) { return count_of(c, &SampleCounts::riesz); }, 1, 10, 1, check_riesz},
      {"isolated", [](const RunConfig& c) { return count_of(c, &SampleCounts::isolated); }, 1, 6, 1, check_isolated},
  };
  return defs;
}

const SuiteDef& find_suite(const std::string& name) {
  for (const auto& d : registry())
    if (d.name == name) return d;
  throw InvalidInput("unknown suite '" + name + "'");
}

std::uint64_t name_hash(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Instances that every run contains regardless of sample counts.
int fixed_instances(const std::string& suite) {
  if (suite == "axioms") return 3;
  if (suite == "count_bound") return 1;
  return 0;
}

Key make_key(const SuiteDef& def, const RunConfig& cfg, int index) {
  std::vector<int> dims;
  const std::vector<int> base = cfg.dims.empty() ? std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10} : cfg.dims;
  for (int d : base)
    if (d >= def.min_dim && d <= def.max_dim) dims.push_back(d);
  if (dims.empty()) dims.push_back(def.max_dim);
  Key k;
  k.suite = def.name;
  k.index = index;
  k.seed = gen::mix_seed(gen::mix_seed(cfg.seed, name_hash(def.name)), static_cast<std::uint64_t>(index));
  k.dim = dims[static_cast<std::size_t>(index) % dims.size()];
  const int fixed = fixed_instances(def.name);
  if (index < fixed) k.variant = 100 + index;
  else k.variant = (index - fixed) % def.variants;
  return k;
}

Ctx make_ctx(const RunConfig& cfg, const SuiteHooks& hooks) {
  Ctx ctx{cfg, hooks.sfl, {}, {}, {}};
  ctx.sopts.tol = cfg.tol;
  if (!ctx.sfl) {
    const SflOptions so = ctx.sopts;
    ctx.sfl = [so](const OperatorPath& p) { return sfl_partition(p, so).value; };
  }
  ctx.hopts.tol = cfg.tol;
  ctx.hopts.maslov.tol = cfg.tol;
  ctx.hopts_random = ctx.hopts;
  ctx.hopts_random.sweep_samples = 128;
  return ctx;
}

Outcome run_check(const SuiteDef& def, const Ctx& ctx, const Key& key) {
  try {
    return def.check(ctx, key);
  } catch (const std::exception& e) {
    Outcome o;
    o.ok = false;
    o.detail["error"] = e.what();
    return o;
  }
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& d : registry()) v.push_back(d.name);
    return v;
  }();
  return names;
}

SuiteReport run_suite(const std::string& name, const RunConfig& cfg, const SuiteHooks& hooks) {
  const SuiteDef& def = find_suite(name);
  const Ctx ctx = make_ctx(cfg, hooks);
  const auto start = std::chrono::steady_clock::now();
  SuiteReport report;
  report.name = name;
  const int total = fixed_instances(name) + std::max(def.count(cfg), 0);
  for (int i = 0; i < total; ++i) {
    const Key key = make_key(def, cfg, i);
    Outcome o = run_check(def, ctx, key);
    if (o.skipped) {
      ++report.skipped;
      continue;
    }
    ++report.instances;
    for (const auto& [k, v] : o.stats) {
      auto [it, inserted] = report.stats.emplace(k, v);
      if (inserted) continue;
      if (k.rfind("max_", 0) == 0) it->second = std::max(it->second, v);
      else if (k.rfind("min_", 0) == 0) it->second = std::min(it->second, v);
      else it->second += v;
    }
    if (!o.ok) report.failures.push_back(json{{"instance", key.to_json()}, {"detail", o.detail}});
  }
  report.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

AxiomReport run_axiom_suite(const RunConfig& cfg, const SuiteHooks& hooks) {
  AxiomReport r;
  const std::vector<std::string>& names = cfg.suites.empty() ? suite_names() : cfg.suites;
  for (const auto& n : names) r.suites.push_back(run_suite(n, cfg, hooks));
  return r;
}

bool replay_failure(const json& failure, const RunConfig& cfg, const SuiteHooks& hooks) {
  const json& inst = failure.contains("instance") ? failure.at("instance") : failure;
  const Key key = Key::from_json(inst);
  const SuiteDef& def = find_suite(key.suite);
  const Ctx ctx = make_ctx(cfg, hooks);
  const Outcome o = run_check(def, ctx, key);
  return !o.ok && !o.skipped;
}

}  // namespace sflow
