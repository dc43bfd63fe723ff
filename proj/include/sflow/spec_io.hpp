#pragma once

// JSON spec files in, JSON reports and CSV trajectories out.
//
// Spec files carry "kind" and entries written in the expression grammar of
// expr.hpp (numbers are accepted wherever an expression is). Reports share
// an envelope: schema_version, command, seed, config, result, certificates,
// crossings (sorted by lambda).

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sflow/expr.hpp"
#include "sflow/hamiltonian.hpp"
#include "sflow/maslov.hpp"
#include "sflow/specflow.hpp"

namespace sflow::io {

inline constexpr const char* kSchemaVersion = "1.0";

using nlohmann::json;

/// Parses a file; syntax errors become InvalidInput.
json load_json(const std::string& path);
json parse_json(const std::string& text);

Matrix parse_matrix(const json& j, const std::string& what);
SymMatrix parse_symmetric(const json& j, const std::string& what, double tol = 1e-12);
json matrix_to_json(const Matrix& m);

/// Matrix of expressions in lambda and t.
class ExprMatrix {
 public:
  static ExprMatrix parse(const json& j, const std::string& what);

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  Matrix eval(double lambda, double t = 0.0) const;
  ExprMatrix derivative(Expr::Var v) const;
  bool depends_on(Expr::Var v) const;

 private:
  Eigen::Index rows_ = 0, cols_ = 0;
  std::vector<Expr> entries_;  // row major
};

/// kind "operator_path" (entries "matrix") or "normalization_path"
/// (numeric "T"); optional "restrict": [lo, hi] and "smoothness_hint".
OperatorPath operator_path_from_spec(const json& spec);

/// A frame of expressions in lambda; checked to be Lagrangian on samples.
LagrangianPath lagrangian_path_from_json(const json& frame, Eigen::Index n, const std::string& what);

struct MaslovSpec {
  enum class Kind { single, pair, graph } kind = Kind::single;
  std::optional<LagrangianPath> path, second;
  std::optional<OperatorPath> operator_path;
  Matrix reference;  // single: frame of L0
};
/// kind "lagrangian_path", "lagrangian_pair" or "operator_path" (graph path).
MaslovSpec maslov_spec_from_json(const json& spec);

struct HamiltonianSpec {
  std::optional<HamiltonianFamily> family;
  std::string task = "sweep";  // sweep | sfl | comparison | isolated_bound
  std::optional<ExprMatrix> k, k_prime;
  double lambda_star = 0.5;
};
HamiltonianSpec hamiltonian_spec_from_json(const json& spec, std::optional<int> grid_override = {});
HamiltonianFamily::Coefficient coefficient_of(const ExprMatrix& m);

struct GapSpec {
  SymMatrix t, s, a, b;
};
GapSpec gap_spec_from_json(const json& spec);

// Reports.
json envelope(const std::string& command, std::uint64_t seed, const json& config);
json to_json(const CrossingRecord& c);
json crossings_json(std::vector<CrossingRecord> crossings);
json to_json(const SflReport& r);           // {result, certificates, crossings}
json to_json(const MaslovReport& r);
json to_json(const SweepReport& r);

/// Pretty-printed with a trailing newline.
std::string dump(const json& j);
void write_file(const std::string& path, const std::string& text);

/// Columns lambda, eig_1..eig_dim.
std::string trajectory_csv(const Trajectory& t);
/// Columns lambda, angle_1..angle_n.
std::string angles_csv(const AngleTrajectory& t);

}  // namespace sflow::io
