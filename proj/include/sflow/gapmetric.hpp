#pragma once

// Gap distance between symmetric matrices, viewed as operators through the
// orthogonal projections onto their graphs {(u, Mu)} in R^n x R^n.

#include "sflow/numerics.hpp"

namespace sflow {

struct GraphProjection {
  Eigen::Index dim = 0;  // n; proj is 2n x 2n
  Matrix proj;
};

/// proj = G (G^T G)^{-1} G^T with G = [I; M].
GraphProjection graph_projection(const SymMatrix& m);

/// ||P_T - P_S||, a value in [0, 1].
double gap_distance(const SymMatrix& t, const SymMatrix& s);

/// One-sided gap ||(I - P_S) P_T||: the largest distance from a unit vector
/// of gra(T) to gra(S).
double gap_delta(const SymMatrix& t, const SymMatrix& s);

struct PerturbationCheck {
  double lhs = 0.0;    // d_G(T + A, S + B)
  double rhs = 0.0;    // 2 sqrt 2 sqrt(1+|A|^2) sqrt(1+|B|^2) (d_G(T,S) + |A - B|)
  double slack = 0.0;  // rhs - lhs
  bool holds = false;  // lhs <= rhs + 1e-9

  /// lhs / rhs (0 when rhs is 0).
  double ratio() const { return rhs > 0.0 ? lhs / rhs : 0.0; }
};

PerturbationCheck perturbation_inequality_check(const SymMatrix& t, const SymMatrix& s, const SymMatrix& a,
                                                const SymMatrix& b);

}  // namespace sflow
