#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sflow/gapmetric.hpp"
#include "sflow/generators.hpp"
#include "sflow/hamiltonian.hpp"
#include "sflow/maslov.hpp"
#include "sflow/numerics.hpp"
#include "sflow/spec_io.hpp"
#include "sflow/specflow.hpp"
#include "sflow/suite.hpp"

namespace py = pybind11;
using namespace sflow;

namespace {

SymMatrix sym(const Matrix& m) {
  if (m.rows() != m.cols()) throw InvalidInput("expected a square matrix");
  return SymMatrix(m);
}

OperatorPath make_path(Eigen::Index dim, const std::function<Matrix(double)>& f,
                       const std::optional<std::function<Matrix(double)>>& df, int hint) {
  OperatorPath::Eval deriv;
  if (df) deriv = [g = *df](double l) { return SymMatrix(g(l)); };
  return OperatorPath(dim, [f](double l) { return SymMatrix(f(l)); }, deriv, hint);
}

SflOptions sfl_options(const Tolerances& tol, bool perturb) {
  SflOptions o;
  o.tol = tol;
  o.perturb_degenerate = perturb;
  return o;
}

py::dict report_dict(const SflReport& r) {
  py::dict d;
  d["value"] = r.value;
  d["method"] = to_string(r.method);
  py::list lams;
  for (const auto& c : r.crossings) lams.append(c.lambda_star);
  d["crossings"] = lams;
  d["perturbed"] = r.diagnostics.perturbed;
  return d;
}

py::dict report_dict(const MaslovReport& r) {
  py::dict d;
  d["value"] = r.value;
  py::list lams;
  for (const auto& c : r.crossings) lams.append(c.lambda_star);
  d["crossings"] = lams;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral flow of symmetric matrix paths, Maslov indices, gap metric and Hamiltonian systems";

  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<NumericalFailure>(m, "NumericalFailure", PyExc_ArithmeticError);

  py::class_<Tolerances>(m, "Tolerances")
      .def(py::init<>())
      .def_readwrite("tol_rank", &Tolerances::tol_rank)
      .def_readwrite("tol_orth", &Tolerances::tol_orth)
      .def_readwrite("tol_eig", &Tolerances::tol_eig)
      .def_readwrite("lambda_res", &Tolerances::lambda_res);

  py::class_<QuadFormIndex>(m, "QuadFormIndex")
      .def_readonly("negative", &QuadFormIndex::negative)
      .def_readonly("positive", &QuadFormIndex::positive)
      .def_readonly("null", &QuadFormIndex::null)
      .def_property_readonly("signature", &QuadFormIndex::signature)
      .def_property_readonly("degenerate", &QuadFormIndex::degenerate);

  // numerics
  m.def(
      "sym_eig",
      [](const Matrix& a) {
        EigDecomp e = sym_eig(sym(a));
        return py::make_tuple(e.values, e.vectors);
      },
      py::arg("m"), "Eigenvalues (ascending) and eigenvectors of a symmetric matrix.");
  m.def(
      "kernel_basis", [](const Matrix& a, double tol) { return kernel_basis(sym(a), tol); }, py::arg("m"),
      py::arg("tol_rank") = Tolerances{}.tol_rank);
  m.def(
      "quadform_index", [](const Matrix& a, double tol) { return quadform_index(sym(a), tol); }, py::arg("q"),
      py::arg("tol_rank") = Tolerances{}.tol_rank);
  m.def("operator_norm", &operator_norm, py::arg("m"));
  m.def(
      "riesz_transform", [](const Matrix& a) { return riesz_transform(sym(a)).matrix(); }, py::arg("m"));

  // spectral flow
  py::class_<OperatorPath>(m, "OperatorPath")
      .def(py::init(&make_path), py::arg("dim"), py::arg("eval"), py::arg("deriv") = py::none(),
           py::arg("smoothness_hint") = 64)
      .def_property_readonly("dim", &OperatorPath::dim)
      .def("eval", [](const OperatorPath& p, double l) { return p.eval(l).matrix(); }, py::arg("lam"))
      .def("reversed", [](const OperatorPath& p) { return reverse(p); })
      .def("restrict", [](const OperatorPath& p, double lo, double hi) { return restrict_path(p, lo, hi); },
           py::arg("lo"), py::arg("hi"))
      .def("riesz", [](const OperatorPath& p) { return riesz_path(p); });

  m.def(
      "sfl_partition",
      [](const OperatorPath& p, const Tolerances& tol) { return report_dict(sfl_partition(p, sfl_options(tol, false))); },
      py::arg("path"), py::arg("tol") = Tolerances{});
  m.def(
      "sfl_crossings",
      [](const OperatorPath& p, const Tolerances& tol, bool perturb) {
        return report_dict(sfl_crossings(p, sfl_options(tol, perturb)));
      },
      py::arg("path"), py::arg("tol") = Tolerances{}, py::arg("perturb") = false);
  m.def("concatenate", py::overload_cast<const OperatorPath&, const OperatorPath&, double>(&concatenate),
        py::arg("p1"), py::arg("p2"), py::arg("tol_orth") = Tolerances{}.tol_orth);
  m.def(
      "constant_path", [](const Matrix& a) { return constant_path(sym(a)); }, py::arg("m"));
  m.def(
      "normalization_path", [](const Matrix& t) { return normalization_path(sym(t)); }, py::arg("t"));
  m.def("generate_operator_path", &gen::generate_operator_path, py::arg("seed"), py::arg("dim"),
        py::arg("crossing_budget"));
  m.def("np_path", &gen::np_path);

  // gap metric
  m.def(
      "gap_distance", [](const Matrix& t, const Matrix& s) { return gap_distance(sym(t), sym(s)); }, py::arg("t"),
      py::arg("s"));
  m.def(
      "gap_delta", [](const Matrix& t, const Matrix& s) { return gap_delta(sym(t), sym(s)); }, py::arg("t"),
      py::arg("s"));
  m.def(
      "graph_projection", [](const Matrix& t) { return graph_projection(sym(t)).proj; }, py::arg("m"));
  m.def(
      "perturbation_inequality",
      [](const Matrix& t, const Matrix& s, const Matrix& a, const Matrix& b) {
        PerturbationCheck c = perturbation_inequality_check(sym(t), sym(s), sym(a), sym(b));
        py::dict d;
        d["lhs"] = c.lhs;
        d["rhs"] = c.rhs;
        d["slack"] = c.slack;
        d["holds"] = c.holds;
        return d;
      },
      py::arg("t"), py::arg("s"), py::arg("a"), py::arg("b"));

  // Lagrangian subspaces
  py::class_<LagrangianPath>(m, "LagrangianPath")
      .def(py::init([](Eigen::Index n, const std::function<Matrix(double)>& f, int hint) {
             return LagrangianPath(n, f, hint);
           }),
           py::arg("n"), py::arg("frame"), py::arg("smoothness_hint") = 64)
      .def_property_readonly("n", &LagrangianPath::n)
      .def("eval", &LagrangianPath::eval, py::arg("lam"));

  m.def("symplectic_j", &symplectic_j, py::arg("n"));
  m.def("is_lagrangian", [](const Matrix& f) { return is_lagrangian(f); }, py::arg("frame"));
  m.def(
      "intersection_dim",
      [](const Matrix& a, const Matrix& b) { return intersection_dim(LagrangianFrame(a), LagrangianFrame(b)); },
      py::arg("l1"), py::arg("l2"));
  m.def(
      "graph_lagrangian", [](const Matrix& t) { return graph_lagrangian(sym(t)).frame(); }, py::arg("t"));
  m.def(
      "maslov_index",
      [](const LagrangianPath& p, const Matrix& l0) { return report_dict(maslov_index(p, LagrangianFrame(l0))); },
      py::arg("path"), py::arg("reference"));
  m.def(
      "maslov_pair_index",
      [](const LagrangianPath& a, const LagrangianPath& b) { return report_dict(maslov_pair_index(a, b)); },
      py::arg("path1"), py::arg("path2"));
  m.def(
      "sfl_via_maslov", [](const OperatorPath& p) { return sfl_via_maslov(p); }, py::arg("path"));

  // Hamiltonian systems
  py::class_<HamiltonianFamily>(m, "HamiltonianFamily")
      .def(py::init([](Eigen::Index n, const HamiltonianFamily::Coefficient& s, const LagrangianPath& bc1,
                       const LagrangianPath& bc2, const std::optional<HamiltonianFamily::Coefficient>& ds, int grid) {
             return HamiltonianFamily(n, s, bc1, bc2, ds ? *ds : HamiltonianFamily::Coefficient{}, grid);
           }),
           py::arg("n"), py::arg("s"), py::arg("bc1"), py::arg("bc2"), py::arg("s_deriv") = py::none(),
           py::arg("grid") = 1000)
      .def_property_readonly("n", &HamiltonianFamily::n)
      .def_property_readonly("grid", &HamiltonianFamily::grid);

  m.def("rotation_family", &gen::rotation_family, py::arg("c") = 3.0 * 3.141592653589793, py::arg("grid") = 1000);
  m.def(
      "monodromy",
      [](const HamiltonianFamily& f, double l) {
        FundamentalSolution fs = fundamental_solution(f, l);
        return py::make_tuple(fs.at_end(), fs.symplectic_drift);
      },
      py::arg("family"), py::arg("lam"), "Psi(1) and the symplectic drift over the grid.");
  m.def(
      "kernel_dimension", [](const HamiltonianFamily& f, double l) { return kernel_dimension(f, l); },
      py::arg("family"), py::arg("lam"));
  m.def(
      "sweep_nontrivial",
      [](const HamiltonianFamily& f) {
        SweepReport r = sweep_nontrivial(f);
        py::dict d;
        py::list lams;
        for (const auto& s : r.solutions) lams.append(s.lambda);
        d["solutions"] = lams;
        d["count"] = r.count;
        d["maslov_pair"] = r.maslov_pair;
        d["bound"] = r.bound;
        d["bound_satisfied"] = r.bound_satisfied;
        return d;
      },
      py::arg("family"));
  m.def(
      "hamiltonian_sfl", [](const HamiltonianFamily& f) { return report_dict(hamiltonian_sfl(f)); },
      py::arg("family"));

  // specs and suites (JSON text in, JSON text out)
  m.def(
      "path_from_spec", [](const std::string& text) { return io::operator_path_from_spec(io::parse_json(text)); },
      py::arg("spec_json"));
  m.def("suite_names", &suite_names);
  m.def(
      "run_suite",
      [](const std::string& name, std::uint64_t seed, int samples) {
        RunConfig cfg;
        cfg.seed = seed;
        if (samples >= 0) cfg.samples = SampleCounts::uniform(samples);
        return io::dump(to_json(run_suite(name, cfg)));
      },
      py::arg("name"), py::arg("seed") = 1, py::arg("samples") = -1,
      "Runs one property suite; returns the JSON report.");
}
