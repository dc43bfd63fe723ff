// sflow command-line tool.
//
// Exit codes: 0 success, 1 verification failure, 2 invalid input,
// 3 numerical failure.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "sflow/gapmetric.hpp"
#include "sflow/hamiltonian.hpp"
#include "sflow/maslov.hpp"
#include "sflow/spec_io.hpp"
#include "sflow/specflow.hpp"
#include "sflow/suite.hpp"

namespace {

using nlohmann::json;
using namespace sflow;

enum Exit { ok = 0, verification = 1, invalid = 2, numerical = 3 };

struct Common {
  std::uint64_t seed = 1;
  std::optional<int> dim;
  std::optional<int> samples;
  std::optional<int> grid;
  Tolerances tol;
  std::string out;
  std::string emit_csv;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "Random seed");
  app->add_option("--dim", c.dim, "Maximum matrix dimension for generated instances")->check(CLI::PositiveNumber);
  app->add_option("--samples", c.samples, "Instances per suite, or trajectory samples for --emit-csv")
      ->check(CLI::PositiveNumber);
  app->add_option("--grid", c.grid, "Time steps for Hamiltonian systems")->check(CLI::PositiveNumber);
  app->add_option("--tol-rank", c.tol.tol_rank, "Relative threshold for zero eigenvalues")->check(CLI::PositiveNumber);
  app->add_option("--tol-orth", c.tol.tol_orth, "Orthogonality tolerance")->check(CLI::PositiveNumber);
  app->add_option("--lambda-res", c.tol.lambda_res, "Crossing localization resolution")->check(CLI::PositiveNumber);
  app->add_option("--out", c.out, "Write the JSON report here instead of stdout");
  app->add_option("--emit-csv", c.emit_csv, "Write an eigenvalue or angle trajectory as CSV");
}

json config_json(const Common& c) {
  json j{{"tolerances", {{"tol_rank", c.tol.tol_rank}, {"tol_orth", c.tol.tol_orth}, {"lambda_res", c.tol.lambda_res}}}};
  j["dim"] = c.dim ? json(*c.dim) : json(nullptr);
  j["samples"] = c.samples ? json(*c.samples) : json(nullptr);
  j["grid"] = c.grid ? json(*c.grid) : json(nullptr);
  return j;
}

void emit(const Common& c, const json& report) {
  const std::string text = io::dump(report);
  if (c.out.empty()) std::cout << text;
  else io::write_file(c.out, text);
}

json merge(json base, const json& part) {
  for (auto it = part.begin(); it != part.end(); ++it) base[it.key()] = it.value();
  return base;
}

int trajectory_samples(const Common& c) { return c.samples.value_or(200); }

int run_sfl(const Common& c, const std::string& spec_path, const std::string& method, bool perturb) {
  const json spec = io::load_json(spec_path);
  const OperatorPath path = io::operator_path_from_spec(spec);
  SflOptions opts;
  opts.tol = c.tol;
  opts.perturb_degenerate = perturb;
  json cfg = config_json(c);
  cfg["method"] = method;
  cfg["perturb"] = perturb;
  cfg["spec"] = spec;
  json report = io::envelope("sfl", c.seed, cfg);
  int code = ok;
  if (method == "partition") {
    report = merge(report, io::to_json(sfl_partition(path, opts)));
  } else if (method == "crossings") {
    report = merge(report, io::to_json(sfl_crossings(path, opts)));
  } else {
    const SflReport p = sfl_partition(path, opts);
    const SflReport x = sfl_crossings(path, opts);
    report = merge(report, io::to_json(p));
    report["crossings"] = io::to_json(x)["crossings"];
    report["result"]["crossings_value"] = x.value;
    report["result"]["agree"] = p.value == x.value;
    report["certificates"]["crossing_diagnostics"] = io::to_json(x)["certificates"]["diagnostics"];
    if (p.value != x.value) code = verification;
  }
  emit(c, report);
  if (!c.emit_csv.empty()) io::write_file(c.emit_csv, io::trajectory_csv(eigenvalue_trajectory(path, trajectory_samples(c))));
  return code;
}

int run_gap(const Common& c, const std::string& spec_path) {
  const json spec = io::load_json(spec_path);
  const io::GapSpec g = io::gap_spec_from_json(spec);
  if (!c.emit_csv.empty()) throw InvalidInput("gap: --emit-csv is not supported");
  const double d = gap_distance(g.t, g.s);
  const double dts = gap_delta(g.t, g.s), dst = gap_delta(g.s, g.t);
  const double identity_error = std::abs(std::max(dts, dst) - d);
  const PerturbationCheck pc = perturbation_inequality_check(g.t, g.s, g.a, g.b);
  json cfg = config_json(c);
  cfg["spec"] = spec;
  json report = io::envelope("gap", c.seed, cfg);
  report["result"] = {{"d_G", d},
                      {"delta_TS", dts},
                      {"delta_ST", dst},
                      {"identity_error", identity_error},
                      {"perturbation",
                       {{"lhs", pc.lhs}, {"rhs", pc.rhs}, {"slack", pc.slack}, {"ratio", pc.ratio()}, {"holds", pc.holds}}}};
  report["certificates"] = {{"identity_holds", identity_error <= 1e-10}};
  report["crossings"] = json::array();
  emit(c, report);
  return (pc.holds && identity_error <= 1e-10) ? ok : verification;
}

int run_maslov(const Common& c, const std::string& spec_path) {
  const json spec = io::load_json(spec_path);
  const io::MaslovSpec m = io::maslov_spec_from_json(spec);
  MaslovOptions opts;
  opts.tol = c.tol;
  MaslovReport r;
  AngleTrajectory angles;
  const int samples = trajectory_samples(c);
  switch (m.kind) {
    case io::MaslovSpec::Kind::single:
      r = maslov_index_general(*m.path, m.reference, symplectic_j(m.path->n()), opts);
      if (!c.emit_csv.empty()) angles = angle_trajectory(*m.path, LagrangianFrame(m.reference, 1e-8), samples);
      break;
    case io::MaslovSpec::Kind::pair:
      r = maslov_pair_index(*m.path, *m.second, opts);
      if (!c.emit_csv.empty())
        for (int k = 0; k <= samples; ++k) {
          const double l = static_cast<double>(k) / samples;
          angles.lambdas.push_back(l);
          angles.angles.push_back(principal_angles(m.path->eval(l), m.second->eval(l)));
        }
      break;
    case io::MaslovSpec::Kind::graph: {
      r = graph_maslov_report(*m.operator_path, opts);
      if (!c.emit_csv.empty()) {
        const OperatorPath op = *m.operator_path;
        LagrangianPath graphs(op.dim(), [op](double l) { return graph_lagrangian(op.eval(l)).frame(); });
        angles = angle_trajectory(graphs, horizontal_lagrangian(op.dim()), samples);
      }
      break;
    }
  }
  json cfg = config_json(c);
  cfg["spec"] = spec;
  json report = merge(io::envelope("maslov", c.seed, cfg), io::to_json(r));
  emit(c, report);
  if (!c.emit_csv.empty()) io::write_file(c.emit_csv, io::angles_csv(angles));
  return ok;
}

int run_hamiltonian(const Common& c, const std::string& spec_path, const std::string& task_flag) {
  const json spec = io::load_json(spec_path);
  io::HamiltonianSpec h = io::hamiltonian_spec_from_json(spec, c.grid);
  if (!task_flag.empty()) {
    json patched = spec;
    patched["task"] = task_flag;
    h = io::hamiltonian_spec_from_json(patched, c.grid);
  }
  const HamiltonianFamily& fam = *h.family;
  HamiltonianOptions opts;
  opts.tol = c.tol;
  opts.maslov.tol = c.tol;
  json cfg = config_json(c);
  cfg["task"] = h.task;
  cfg["spec"] = spec;
  json report = io::envelope("hamiltonian", c.seed, cfg);
  int code = ok;
  if (h.task == "sweep") {
    const SweepReport s = sweep_nontrivial(fam, opts);
    report = merge(report, io::to_json(s));
    if (!s.bound_satisfied) code = verification;
  } else if (h.task == "sfl") {
    report = merge(report, io::to_json(hamiltonian_sfl(fam, opts)));
  } else if (h.task == "comparison") {
    const io::ExprMatrix& k = *h.k;
    const io::ExprMatrix& kp = *h.k_prime;
    const ComparisonResult r =
        comparison_check(fam, io::coefficient_of(k), io::coefficient_of(k.derivative(Expr::Var::lambda)),
                         io::coefficient_of(kp), io::coefficient_of(kp.derivative(Expr::Var::lambda)), opts);
    report["result"] = {{"sfl_k", r.sfl_k}, {"sfl_k_prime", r.sfl_k_prime}, {"holds", r.holds}};
    report["certificates"] = json::object();
    report["crossings"] = json::array();
    if (!r.holds) code = verification;
  } else {
    const IsolatedBound b = isolated_bound_check(fam, h.lambda_star, opts);
    report["result"] = {{"sfl_abs", b.sfl_abs}, {"kernel_dim", b.kernel_dim}, {"holds", b.holds}};
    report["certificates"] = json::object();
    report["crossings"] = json::array();
    if (!b.holds) code = verification;
  }
  double drift = 0.0;
  for (double l : {0.0, 1.0}) drift = std::max(drift, fundamental_solution(fam, l, opts).symplectic_drift);
  report["certificates"]["symplectic_drift"] = drift;
  report["certificates"]["grid"] = fam.grid();
  emit(c, report);
  if (!c.emit_csv.empty()) {
    AngleTrajectory angles;
    const int samples = trajectory_samples(c);
    for (int k = 0; k <= samples; ++k) {
      const double l = static_cast<double>(k) / samples;
      const Matrix moved = orthonormalize(fundamental_solution(fam, l, opts).at_end() * fam.bc1().eval(l));
      angles.lambdas.push_back(l);
      angles.angles.push_back(principal_angles(moved, fam.bc2().eval(l)));
    }
    io::write_file(c.emit_csv, io::angles_csv(angles));
  }
  return code;
}

int run_axioms(const Common& c, const std::vector<std::string>& suites, const std::string& replay) {
  RunConfig cfg;
  cfg.seed = c.seed;
  cfg.tol = c.tol;
  if (c.dim)
    for (int d = 1; d <= *c.dim; ++d) cfg.dims.push_back(d);
  if (c.samples) cfg.samples = SampleCounts::uniform(*c.samples);
  if (c.grid) cfg.grid = *c.grid;
  cfg.suites = suites;
  for (const auto& s : suites) {
    const auto& names = suite_names();
    if (std::find(names.begin(), names.end(), s) == names.end()) throw InvalidInput("unknown suite '" + s + "'");
  }
  if (!c.emit_csv.empty()) throw InvalidInput("axioms: --emit-csv is not supported");

  if (!replay.empty()) {
    const json failure = io::load_json(replay);
    const bool reproduced = replay_failure(failure, cfg);
    json report = io::envelope("axioms", c.seed, to_json(cfg));
    report["result"] = {{"replayed", failure}, {"reproduced", reproduced}};
    report["certificates"] = json::object();
    report["crossings"] = json::array();
    emit(c, report);
    return reproduced ? verification : ok;
  }

  AxiomReport r;
  const std::vector<std::string>& names = suites.empty() ? suite_names() : suites;
  for (const auto& n : names) {
    r.suites.push_back(run_suite(n, cfg));
    const SuiteReport& s = r.suites.back();
    std::cerr << (s.verdict() ? "PASS " : "FAIL ") << s.name << ": " << s.instances << " instances, "
              << s.failures.size() << " failures (" << s.elapsed_seconds << " s)\n";
  }
  json report = io::envelope("axioms", c.seed, to_json(cfg));
  report["result"] = to_json(r);
  report["certificates"] = json::object();
  report["crossings"] = json::array();
  emit(c, report);
  return r.verdict() ? ok : verification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral flow, gap metric, Maslov index and Hamiltonian systems toolkit"};
  app.require_subcommand(1);
  Common common;
  std::string spec, method = "both", task, replay;
  bool perturb = false;
  std::vector<std::string> suites;

  auto* sfl = app.add_subcommand("sfl", "Spectral flow of an operator path spec");
  sfl->add_option("spec", spec, "Path spec (JSON)")->required();
  sfl->add_option("--method", method, "partition, crossings or both")
      ->check(CLI::IsMember({"partition", "crossings", "both"}));
  sfl->add_flag("--perturb", perturb, "Resolve degenerate crossings by a reported perturbation");
  add_common(sfl, common);

  auto* gap = app.add_subcommand("gap", "Gap distance between two matrices and the perturbation inequality");
  gap->add_option("spec", spec, "Gap spec (JSON)")->required();
  add_common(gap, common);

  auto* maslov = app.add_subcommand("maslov", "Maslov index of a Lagrangian path, pair or graph path");
  maslov->add_option("spec", spec, "Lagrangian path spec (JSON)")->required();
  add_common(maslov, common);

  auto* ham = app.add_subcommand("hamiltonian", "Parametrized linear Hamiltonian boundary value problem");
  ham->add_option("spec", spec, "Family spec (JSON)")->required();
  ham->add_option("--task", task, "sweep, sfl, comparison or isolated_bound (overrides the spec)")
      ->check(CLI::IsMember({"sweep", "sfl", "comparison", "isolated_bound"}));
  add_common(ham, common);

  auto* axioms = app.add_subcommand("axioms", "Run the randomized property suite");
  axioms->add_option("--suite", suites, "Restrict to these suites (repeatable)");
  axioms->add_option("--replay", replay, "Replay a serialized failure record");
  add_common(axioms, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return invalid;
  }

  try {
    if (*sfl) return run_sfl(common, spec, method, perturb);
    if (*gap) return run_gap(common, spec);
    if (*maslov) return run_maslov(common, spec);
    if (*ham) return run_hamiltonian(common, spec, task);
    if (*axioms) return run_axioms(common, suites, replay);
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return invalid;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what();
    if (e.lambda()) std::cerr << " (lambda = " << *e.lambda() << ")";
    std::cerr << "\n";
    return numerical;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return numerical;
  }
  return invalid;
}
