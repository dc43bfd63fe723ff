#pragma once

// Linear Hamiltonian boundary value problems
//
//   J u'(t) + S_lambda(t) u(t) = 0,   u(0) in Lambda1(lambda), u(1) in Lambda2(lambda)
//
// solved by shooting: Psi' = J S Psi, Psi(0) = I, and nontrivial solutions
// exist exactly when Psi(1) Lambda1(lambda) meets Lambda2(lambda).

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sflow/maslov.hpp"
#include "sflow/specflow.hpp"

namespace sflow {

class HamiltonianFamily {
 public:
  using Coefficient = std::function<Matrix(double lambda, double t)>;  // symmetric 2n x 2n

  HamiltonianFamily(Eigen::Index n, Coefficient s, LagrangianPath bc1, LagrangianPath bc2,
                    Coefficient s_deriv = {}, int grid = 1000);

  Eigen::Index n() const { return n_; }
  int grid() const { return grid_; }
  bool has_deriv() const { return static_cast<bool>(s_deriv_); }
  const LagrangianPath& bc1() const { return bc1_; }
  const LagrangianPath& bc2() const { return bc2_; }
  const Coefficient& coefficient() const { return s_; }
  const Coefficient& coefficient_deriv() const { return s_deriv_; }

  Matrix s(double lambda, double t) const;
  Matrix s_deriv(double lambda, double t) const;

  HamiltonianFamily with_grid(int grid) const;
  /// Same boundary conditions, coefficient S + extra.
  HamiltonianFamily plus(const Coefficient& extra, const Coefficient& extra_deriv) const;
  /// lambda -> 1 - lambda.
  HamiltonianFamily reversed() const;

 private:
  Eigen::Index n_;
  Coefficient s_;
  Coefficient s_deriv_;
  LagrangianPath bc1_;
  LagrangianPath bc2_;
  int grid_;
};

struct FundamentalSolution {
  double lambda = 0.0;
  std::vector<double> times;  // grid nodes, times[0] = 0, times.back() = 1
  std::vector<Matrix> psi;    // Psi at every node
  double symplectic_drift = 0.0;  // max over the grid of |Psi^T J Psi - J|

  const Matrix& at_end() const { return psi.back(); }
};

struct HamiltonianOptions {
  Tolerances tol;
  int sweep_samples = 2048;
  double sweep_resolution = 1e-8;
  double drift_threshold = 1e-8;
  bool check_drift = true;  // throw above 100 x drift_threshold
  MaslovOptions maslov;
};

/// Classical fourth-order Runge-Kutta on the family's time grid.
FundamentalSolution fundamental_solution(const HamiltonianFamily& fam, double lambda,
                                         const HamiltonianOptions& opts = {});

/// dim of nontrivial solutions at lambda: dim(Psi(1) Lambda1 ∩ Lambda2).
int kernel_dimension(const HamiltonianFamily& fam, double lambda, const HamiltonianOptions& opts = {});

struct SolutionRecord {
  double lambda = 0.0;
  int kernel_dim = 0;
  Matrix initial_values;  // columns u(0) of a basis of solutions
};

struct SweepReport {
  std::vector<SolutionRecord> solutions;
  int count = 0;  // N, the number of parameters with nontrivial solutions
  // mu(Lambda1, Lambda2) and ceil(|mu| / n); empty when the boundary
  // conditions intersect on a whole interval and the pair index is undefined.
  std::optional<int> maslov_pair;
  std::optional<int> bound;
  std::string maslov_note;
  bool bound_satisfied = true;
};

SweepReport sweep_nontrivial(const HamiltonianFamily& fam, const HamiltonianOptions& opts = {});

/// Spectral flow of lambda -> A + K_lambda for constant boundary conditions:
/// crossing form int_0^1 <dS/dlambda u, u> dt on the solution space.
SflReport hamiltonian_sfl(const HamiltonianFamily& fam, const HamiltonianOptions& opts = {});

struct ComparisonResult {
  int sfl_k = 0;
  int sfl_k_prime = 0;
  bool holds = false;
};

/// Matrix model: sfl(A + K) >= sfl(A + K') when K'(0) >= K(0) and K(1) >= K'(1).
ComparisonResult comparison_check(const OperatorPath& a, const OperatorPath& k, const OperatorPath& k_prime,
                                  const SflOptions& opts = {});

/// Hamiltonian model: K and K' are multiplication by coefficient families;
/// the hypotheses are checked pointwise on the time grid.
ComparisonResult comparison_check(const HamiltonianFamily& base, const HamiltonianFamily::Coefficient& k,
                                  const HamiltonianFamily::Coefficient& k_deriv,
                                  const HamiltonianFamily::Coefficient& k_prime,
                                  const HamiltonianFamily::Coefficient& k_prime_deriv,
                                  const HamiltonianOptions& opts = {});

struct IsolatedBound {
  int sfl_abs = 0;
  int kernel_dim = 0;
  bool holds = false;
};

/// |sfl| <= dim ker at the single crossing lambda_star in (0, 1).
IsolatedBound isolated_bound_check(const OperatorPath& path, double lambda_star, const SflOptions& opts = {});
IsolatedBound isolated_bound_check(const HamiltonianFamily& fam, double lambda_star,
                                   const HamiltonianOptions& opts = {});

}  // namespace sflow
