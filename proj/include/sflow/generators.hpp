#pragma once

// Seeded random instances for the property suite. Every generator is a pure
// function of its arguments, so (generator, seed, dim, ...) is a complete
// serialization of an instance.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sflow/hamiltonian.hpp"
#include "sflow/maslov.hpp"
#include "sflow/specflow.hpp"

namespace sflow::gen {

/// mt19937_64 with a portable conversion to doubles.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Integer in [lo, hi].
  int integer(int lo, int hi) { return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1)); }
  double sign() { return (engine_() & 1u) ? 1.0 : -1.0; }
  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Deterministic derivation of sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

Matrix random_symmetric(Rng& rng, Eigen::Index dim, double scale = 1.0);
/// Positive semidefinite with the given rank (uniformly random rank when < 0).
Matrix random_psd(Rng& rng, Eigen::Index dim, int rank = -1, double scale = 1.0);
Matrix random_orthogonal(Rng& rng, Eigen::Index dim);

/// h(s, lambda) = U(s, lambda)^T D(s, lambda) U(s, lambda): U a product of
/// planar rotations with trigonometric angles, D_i = amp_i sin(pi p_i) with
/// trigonometric phases p_i. The number of zero crossings of D_i along
/// lambda is governed by the integer drift of p_i.
class TrigFamily {
 public:
  struct Rotation {
    Eigen::Index i = 0, j = 1;
    double base = 0.0, amp = 0.0, freq = 1.0, phase = 0.0;  // base + amp sin(2 pi freq lambda + phase)
    double s_amp = 0.0, s_freq = 1.0, s_shift = 0.0, s_phase = 0.0;  // + w(lambda) s_amp sin(2 pi (s_freq s + s_shift lambda) + s_phase)
  };
  struct Entry {
    double amp = 1.0;
    double drift = 0.0, offset = 0.5;                  // drift lambda + offset
    double wiggle = 0.0, freq = 1.0, phase = 0.0;       // + wiggle sin(2 pi freq lambda + phase)
    double s_amp = 0.0, s_freq = 1.0, s_shift = 0.0, s_phase = 0.0;
  };
  /// Weight w(lambda) on the s-dependent terms.
  enum class Weight { one, bubble };  // 1 or lambda (1 - lambda)

  TrigFamily(Eigen::Index dim, std::vector<Rotation> rotations, std::vector<Entry> entries,
             Weight rotation_weight = Weight::one, Weight entry_weight = Weight::one);

  Eigen::Index dim() const { return dim_; }
  SymMatrix eval(double s, double lambda) const;
  SymMatrix d_lambda(double s, double lambda) const;
  SymMatrix d_s(double s, double lambda) const;
  /// Diagonal factor D(s, lambda).
  Vector diagonal(double s, double lambda) const;

  /// lambda -> h(s, lambda) with derivative.
  OperatorPath lambda_path(double s) const;
  /// s -> h(s, lambda) with derivative.
  OperatorPath s_path(double lambda) const;

 private:
  struct Eval {
    Matrix u, du;     // U and its partial derivative
    Vector d, dd;     // D and its partial derivative
  };
  Eval evaluate(double s, double lambda, bool wrt_lambda) const;

  Eigen::Index dim_;
  std::vector<Rotation> rotations_;
  std::vector<Entry> entries_;
  Weight rotation_weight_, entry_weight_;
};

/// A_lambda = U^T D U with about `crossing_budget` simple zero crossings.
OperatorPath generate_operator_path(std::uint64_t seed, Eigen::Index dim, int crossing_budget);
TrigFamily generate_operator_family(std::uint64_t seed, Eigen::Index dim, int crossing_budget);

enum class HomotopyMode { generic, free_loop, fixed_edge, invertible_edge };
std::string to_string(HomotopyMode m);
HomotopyMode homotopy_mode_from_string(const std::string& s);
TrigFamily generate_homotopy(std::uint64_t seed, Eigen::Index dim, HomotopyMode mode);

/// U(lambda)^T D U(lambda) with fixed D containing `kernel_dim` zeros.
OperatorPath constant_kernel_path(std::uint64_t seed, Eigen::Index dim, int kernel_dim);

/// U(lambda)^T D(lambda) U(lambda) where exactly `kernel_dim` entries vanish,
/// all at lambda_star, and the rest stay away from zero.
OperatorPath single_crossing_path(std::uint64_t seed, Eigen::Index dim, int kernel_dim, double lambda_star);

/// diag(lambda - 1/2, 1, -1).
OperatorPath np_path();

/// Random symmetric T with a kernel of the given dimension and at least one
/// nonzero eigenvalue.
SymMatrix random_with_kernel(std::uint64_t seed, Eigen::Index dim, int kernel_dim);

// Hamiltonian instances.

/// Lagrangian span of the columns of [X; Y] for X + iY unitary.
Matrix random_lagrangian(Rng& rng, Eigen::Index n);

/// n = 1, Lambda1 = Lambda2 = span{e1}, S = c lambda I.
HamiltonianFamily rotation_family(double c = 3.0 * 3.141592653589793, int grid = 1000);

/// n = 1: Lambda1 rotating counterclockwise by total angle `turn`, Lambda2 =
/// span{e1}, S = eps (2 lambda - 1) I.
HamiltonianFamily rotating_boundary_family(double turn, double eps, int grid = 1000);

struct CountBoundInstance {
  HamiltonianFamily family;
  int maslov_pair = 0;
};
/// Rotating boundary conditions with S_0 and S_1 of the signs required by
/// the count bound for the pair index.
CountBoundInstance count_bound_instance(std::uint64_t seed, int grid, const MaslovOptions& opts = {});

struct HamiltonianComparisonInstance {
  HamiltonianFamily base;
  HamiltonianFamily::Coefficient k, k_deriv, k_prime, k_prime_deriv;
};
/// Constant boundary conditions, S = 0 base, K' = K + (1 - lambda) P0 - lambda P1.
HamiltonianComparisonInstance hamiltonian_comparison_instance(std::uint64_t seed, Eigen::Index n, int grid);

struct MatrixComparisonInstance {
  OperatorPath a, k, k_prime;
};
MatrixComparisonInstance matrix_comparison_instance(std::uint64_t seed, Eigen::Index dim);

}  // namespace sflow::gen
