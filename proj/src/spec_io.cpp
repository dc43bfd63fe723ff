#include "sflow/spec_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace sflow::io {

namespace {

const json& require(const json& spec, const char* field) {
  if (!spec.is_object() || !spec.contains(field))
    throw InvalidInput(std::string("spec: missing field '") + field + "'");
  return spec.at(field);
}

std::string kind_of(const json& spec) {
  const json& k = require(spec, "kind");
  if (!k.is_string()) throw InvalidInput("spec: 'kind' must be a string");
  return k.get<std::string>();
}

Eigen::Index positive_int(const json& spec, const char* field) {
  const json& v = require(spec, field);
  if (!v.is_number_integer() || v.get<long long>() < 1)
    throw InvalidInput(std::string("spec: '") + field + "' must be a positive integer");
  return static_cast<Eigen::Index>(v.get<long long>());
}

void check_version(const json& spec) {
  if (spec.contains("schema_version")) {
    const json& v = spec.at("schema_version");
    if (!v.is_string() || v.get<std::string>().rfind("1.", 0) != 0)
      throw InvalidInput("spec: unsupported schema_version");
  }
}

void check_shape(const json& j, const std::string& what, std::size_t& rows, std::size_t& cols) {
  if (!j.is_array() || j.empty()) throw InvalidInput(what + ": expected a non-empty array of rows");
  rows = j.size();
  cols = 0;
  for (const json& r : j) {
    if (!r.is_array() || r.empty()) throw InvalidInput(what + ": every row must be a non-empty array");
    if (cols == 0) cols = r.size();
    if (r.size() != cols) throw InvalidInput(what + ": ragged rows");
  }
}

}  // namespace

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("malformed JSON: ") + e.what());
  }
}

json load_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

Matrix parse_matrix(const json& j, const std::string& what) {
  std::size_t rows = 0, cols = 0;
  check_shape(j, what, rows, cols);
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      const json& v = j[r][c];
      if (!v.is_number()) throw InvalidInput(what + ": entries must be numbers");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v.get<double>();
    }
  if (!m.allFinite()) throw InvalidInput(what + ": non-finite entry");
  return m;
}

SymMatrix parse_symmetric(const json& j, const std::string& what, double tol) {
  const Matrix m = parse_matrix(j, what);
  if (m.rows() != m.cols()) throw InvalidInput(what + ": matrix must be square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol * scale) throw InvalidInput(what + ": matrix must be symmetric");
  return SymMatrix(m);
}

json matrix_to_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

ExprMatrix ExprMatrix::parse(const json& j, const std::string& what) {
  std::size_t rows = 0, cols = 0;
  check_shape(j, what, rows, cols);
  ExprMatrix m;
  m.rows_ = static_cast<Eigen::Index>(rows);
  m.cols_ = static_cast<Eigen::Index>(cols);
  for (const json& row : j)
    for (const json& v : row) {
      if (v.is_number()) m.entries_.push_back(Expr::constant(v.get<double>()));
      else if (v.is_string()) m.entries_.push_back(Expr::parse(v.get<std::string>()));
      else throw InvalidInput(what + ": entries must be numbers or expression strings");
    }
  return m;
}

Matrix ExprMatrix::eval(double lambda, double t) const {
  Matrix m(rows_, cols_);
  for (Eigen::Index r = 0; r < rows_; ++r)
    for (Eigen::Index c = 0; c < cols_; ++c) m(r, c) = entries_[static_cast<std::size_t>(r * cols_ + c)].eval(lambda, t);
  return m;
}

ExprMatrix ExprMatrix::derivative(Expr::Var v) const {
  ExprMatrix d = *this;
  for (auto& e : d.entries_) e = e.derivative(v);
  return d;
}

bool ExprMatrix::depends_on(Expr::Var v) const {
  return std::any_of(entries_.begin(), entries_.end(), [v](const Expr& e) { return e.depends_on(v); });
}

namespace {

// Symmetry and finiteness on a sample grid.
void check_symmetric_family(const ExprMatrix& m, const std::string& what, bool with_t) {
  if (m.rows() != m.cols()) throw InvalidInput(what + ": matrix must be square");
  for (int a = 0; a <= 8; ++a)
    for (int b = 0; b <= (with_t ? 4 : 0); ++b) {
      const Matrix v = m.eval(a / 8.0, b / 4.0);
      if (!v.allFinite()) throw InvalidInput(what + ": non-finite value at lambda = " + std::to_string(a / 8.0));
      const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
      if ((v - v.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw InvalidInput(what + ": matrix is not symmetric");
    }
}

}  // namespace

OperatorPath operator_path_from_spec(const json& spec) {
  check_version(spec);
  const std::string kind = kind_of(spec);
  std::optional<OperatorPath> path;
  if (kind == "operator_path") {
    const ExprMatrix m = ExprMatrix::parse(require(spec, "matrix"), "matrix");
    if (spec.contains("dim") && positive_int(spec, "dim") != m.rows())
      throw InvalidInput("operator_path: 'dim' does not match the matrix");
    if (m.depends_on(Expr::Var::t)) throw InvalidInput("operator_path: entries may only depend on lambda");
    check_symmetric_family(m, "operator_path", false);
    const ExprMatrix d = m.derivative(Expr::Var::lambda);
    int hint = 64;
    if (spec.contains("smoothness_hint")) hint = static_cast<int>(positive_int(spec, "smoothness_hint"));
    path = OperatorPath(
        m.rows(), [m](double l) { return SymMatrix(m.eval(l)); }, [d](double l) { return SymMatrix(d.eval(l)); }, hint);
  } else if (kind == "normalization_path") {
    path = normalization_path(parse_symmetric(require(spec, "T"), "T"));
  } else {
    throw InvalidInput("sfl: unsupported kind '" + kind + "'");
  }
  if (spec.contains("restrict")) {
    const json& r = spec.at("restrict");
    if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number())
      throw InvalidInput("restrict: expected [lo, hi]");
    path = restrict_path(*path, r[0].get<double>(), r[1].get<double>());
  }
  return *path;
}

LagrangianPath lagrangian_path_from_json(const json& frame, Eigen::Index n, const std::string& what) {
  const ExprMatrix m = ExprMatrix::parse(frame, what);
  if (m.rows() != 2 * n || m.cols() != n) throw InvalidInput(what + ": expected a 2n x n frame");
  if (m.depends_on(Expr::Var::t)) throw InvalidInput(what + ": frames may only depend on lambda");
  for (int a = 0; a <= 8; ++a) {
    const Matrix f = m.eval(a / 8.0);
    if (!f.allFinite()) throw InvalidInput(what + ": non-finite frame");
    try {
      if (!is_lagrangian(orthonormalize(f), 1e-8)) throw InvalidInput(what + ": frame is not Lagrangian");
    } catch (const InvalidInput&) {
      throw InvalidInput(what + ": frame is not a Lagrangian subspace at lambda = " + std::to_string(a / 8.0));
    }
  }
  return LagrangianPath(n, [m](double l) { return m.eval(l); }, 64);
}

MaslovSpec maslov_spec_from_json(const json& spec) {
  check_version(spec);
  const std::string kind = kind_of(spec);
  MaslovSpec out;
  if (kind == "operator_path" || kind == "normalization_path") {
    out.kind = MaslovSpec::Kind::graph;
    out.operator_path = operator_path_from_spec(spec);
    return out;
  }
  const Eigen::Index n = positive_int(spec, "n");
  if (kind == "lagrangian_path") {
    out.kind = MaslovSpec::Kind::single;
    out.path = lagrangian_path_from_json(require(spec, "frame"), n, "frame");
    if (spec.contains("reference")) {
      out.reference = parse_matrix(spec.at("reference"), "reference");
      if (out.reference.rows() != 2 * n || out.reference.cols() != n)
        throw InvalidInput("reference: expected a 2n x n frame");
      out.reference = LagrangianFrame(out.reference, 1e-8).frame();
    } else {
      out.reference = horizontal_lagrangian(n).frame();
    }
  } else if (kind == "lagrangian_pair") {
    out.kind = MaslovSpec::Kind::pair;
    out.path = lagrangian_path_from_json(require(spec, "frame1"), n, "frame1");
    out.second = lagrangian_path_from_json(require(spec, "frame2"), n, "frame2");
  } else {
    throw InvalidInput("maslov: unsupported kind '" + kind + "'");
  }
  return out;
}

HamiltonianFamily::Coefficient coefficient_of(const ExprMatrix& m) {
  return [m](double l, double t) { return m.eval(l, t); };
}

HamiltonianSpec hamiltonian_spec_from_json(const json& spec, std::optional<int> grid_override) {
  check_version(spec);
  if (kind_of(spec) != "hamiltonian_family") throw InvalidInput("hamiltonian: kind must be 'hamiltonian_family'");
  const Eigen::Index n = positive_int(spec, "n");
  HamiltonianSpec out;
  auto coefficient = [&](const char* field) {
    const ExprMatrix m = ExprMatrix::parse(require(spec, field), field);
    if (m.rows() != 2 * n || m.cols() != 2 * n) throw InvalidInput(std::string(field) + ": expected 2n x 2n");
    check_symmetric_family(m, field, true);
    return m;
  };
  const ExprMatrix s = coefficient("S");
  const LagrangianPath bc1 = lagrangian_path_from_json(require(spec, "bc1"), n, "bc1");
  const LagrangianPath bc2 = lagrangian_path_from_json(require(spec, "bc2"), n, "bc2");
  int grid = 1000;
  if (spec.contains("grid")) grid = static_cast<int>(positive_int(spec, "grid"));
  if (grid_override) grid = *grid_override;
  out.family.emplace(n, coefficient_of(s), bc1, bc2, coefficient_of(s.derivative(Expr::Var::lambda)), grid);
  if (spec.contains("task")) {
    if (!spec.at("task").is_string()) throw InvalidInput("task must be a string");
    out.task = spec.at("task").get<std::string>();
  }
  if (out.task == "comparison") {
    out.k = coefficient("K");
    out.k_prime = coefficient("K_prime");
  } else if (out.task == "isolated_bound") {
    const json& ls = require(spec, "lambda_star");
    if (!ls.is_number()) throw InvalidInput("lambda_star must be a number");
    out.lambda_star = ls.get<double>();
  } else if (out.task != "sweep" && out.task != "sfl") {
    throw InvalidInput("unknown hamiltonian task '" + out.task + "'");
  }
  return out;
}

GapSpec gap_spec_from_json(const json& spec) {
  check_version(spec);
  if (kind_of(spec) != "gap") throw InvalidInput("gap: kind must be 'gap'");
  GapSpec g;
  g.t = parse_symmetric(require(spec, "T"), "T");
  g.s = parse_symmetric(require(spec, "S"), "S");
  if (g.t.dim() != g.s.dim())
    throw InvalidInput("gap: dimension mismatch (" + std::to_string(g.t.dim()) + " vs " + std::to_string(g.s.dim()) + ")");
  g.a = spec.contains("A") ? parse_symmetric(spec.at("A"), "A") : SymMatrix::zero(g.t.dim());
  g.b = spec.contains("B") ? parse_symmetric(spec.at("B"), "B") : SymMatrix::zero(g.t.dim());
  if (g.a.dim() != g.t.dim() || g.b.dim() != g.t.dim()) throw InvalidInput("gap: dimension mismatch in A or B");
  return g;
}

json envelope(const std::string& command, std::uint64_t seed, const json& config) {
  return json{{"schema_version", kSchemaVersion}, {"command", command}, {"seed", seed}, {"config", config}};
}

json to_json(const CrossingRecord& c) {
  return json{{"lambda", c.lambda_star},
              {"kernel_dim", c.kernel.cols()},
              {"kernel", matrix_to_json(c.kernel)},
              {"form", matrix_to_json(c.form.matrix())},
              {"index", {{"negative", c.index.negative}, {"positive", c.index.positive}, {"null", c.index.null}}},
              {"regular", c.regular},
              {"contribution", c.contribution()}};
}

json crossings_json(std::vector<CrossingRecord> crossings) {
  std::stable_sort(crossings.begin(), crossings.end(),
                   [](const CrossingRecord& a, const CrossingRecord& b) { return a.lambda_star < b.lambda_star; });
  json out = json::array();
  for (const auto& c : crossings) out.push_back(to_json(c));
  return out;
}

json to_json(const SflReport& r) {
  json segments = json::array();
  for (const auto& s : r.segments)
    segments.push_back({{"lambda_lo", s.lambda_lo},
                        {"lambda_hi", s.lambda_hi},
                        {"a", s.a},
                        {"count_lo", s.count_lo},
                        {"count_hi", s.count_hi},
                        {"depth", s.depth}});
  const SflDiagnostics& d = r.diagnostics;
  return json{{"result", {{"value", r.value}, {"method", to_string(r.method)}}},
              {"certificates",
               {{"segments", segments},
                {"diagnostics",
                 {{"evaluations", d.evaluations},
                  {"initial_segments", d.initial_segments},
                  {"max_depth", d.max_depth},
                  {"doubling_checked", d.doubling_checked},
                  {"perturbed", d.perturbed},
                  {"perturbation", d.perturbation}}}}},
              {"crossings", crossings_json(r.crossings)}};
}

json to_json(const MaslovReport& r) {
  return json{{"result", {{"value", r.value}}},
              {"certificates", {{"evaluations", r.evaluations}}},
              {"crossings", crossings_json(r.crossings)}};
}

json to_json(const SweepReport& r) {
  json solutions = json::array();
  std::vector<const SolutionRecord*> sorted;
  for (const auto& s : r.solutions) sorted.push_back(&s);
  std::stable_sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->lambda < b->lambda; });
  for (const auto* s : sorted)
    solutions.push_back(
        {{"lambda", s->lambda}, {"kernel_dim", s->kernel_dim}, {"initial_values", matrix_to_json(s->initial_values)}});
  json result{{"count", r.count}, {"bound_satisfied", r.bound_satisfied}};
  result["maslov_pair"] = r.maslov_pair ? json(*r.maslov_pair) : json(nullptr);
  result["bound"] = r.bound ? json(*r.bound) : json(nullptr);
  if (!r.maslov_note.empty()) result["maslov_note"] = r.maslov_note;
  return json{{"result", result}, {"certificates", json::object()}, {"crossings", solutions}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << text;
  if (!out) throw InvalidInput("failed writing '" + path + "'");
}

namespace {

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

std::string csv(const std::vector<double>& lambdas, const std::vector<Vector>& rows, const std::string& prefix) {
  std::ostringstream out;
  const Eigen::Index width = rows.empty() ? 0 : rows.front().size();
  out << "lambda";
  for (Eigen::Index k = 1; k <= width; ++k) out << ',' << prefix << k;
  out << '\n';
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    out << fmt(lambdas[i]);
    for (Eigen::Index k = 0; k < rows[i].size(); ++k) out << ',' << fmt(rows[i](k));
    out << '\n';
  }
  return out.str();
}

}  // namespace

std::string trajectory_csv(const Trajectory& t) { return csv(t.lambdas, t.values, "eig_"); }

std::string angles_csv(const AngleTrajectory& t) { return csv(t.lambdas, t.angles, "angle_"); }

}  // namespace sflow::io
