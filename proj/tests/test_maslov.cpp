#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sflow/generators.hpp"
#include "sflow/maslov.hpp"

using namespace sflow;

namespace {

constexpr double kPi = std::numbers::pi;

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Matrix unit_columns(Eigen::Index dim, std::initializer_list<int> idx) {
  Matrix f = Matrix::Zero(dim, static_cast<Eigen::Index>(idx.size()));
  Eigen::Index c = 0;
  for (int i : idx) f(i, c++) = 1.0;
  return f;
}

LagrangianPath line_path(std::function<double(double)> theta) {
  return LagrangianPath(1, [theta](double l) {
    Matrix f(2, 1);
    f << std::cos(theta(l)), std::sin(theta(l));
    return f;
  });
}

// Oracle for a line at angle theta(l) against the horizontal: zeros of
// sin theta, with the sign of d theta / d lambda and the endpoint rules.
int line_oracle(double theta0, double theta1) {
  // Monotone theta: interior multiples of pi, plus endpoints.
  int total = 0;
  const double dir = theta1 > theta0 ? 1.0 : -1.0;
  const double lo = std::min(theta0, theta1), hi = std::max(theta0, theta1);
  for (int k = static_cast<int>(std::ceil(lo / kPi - 1e-12)); k * kPi <= hi + 1e-12; ++k) {
    const double a = k * kPi;
    const bool at0 = std::abs(a - theta0) < 1e-12, at1 = std::abs(a - theta1) < 1e-12;
    if (at0)
      total += dir > 0 ? 0 : -1;
    else if (at1)
      total += dir > 0 ? 1 : 0;
    else
      total += static_cast<int>(dir);
  }
  return total;
}

}  // namespace

TEST_CASE("symplectic matrix") {
  Matrix j = symplectic_j(2);
  CHECK((j * j + Matrix::Identity(4, 4)).norm() == 0.0);
  CHECK((j.transpose() + j).norm() == 0.0);
  CHECK(j(2, 0) == 1.0);
  CHECK(j(0, 2) == -1.0);
}

TEST_CASE("is_lagrangian examples") {
  CHECK(is_lagrangian(unit_columns(2, {0})));
  CHECK(is_lagrangian(unit_columns(4, {0, 1})));
  // omega(e1, e3) = <J e1, e3> = 1
  CHECK(symplectic_j(2)(2, 0) != 0.0);
  CHECK_FALSE(is_lagrangian(unit_columns(4, {0, 2})));
  CHECK_THROWS_AS(LagrangianFrame(unit_columns(4, {0, 2})), InvalidInput);
}

TEST_CASE("intersection dimension examples") {
  LagrangianFrame l(unit_columns(4, {0, 1}));
  CHECK(intersection_dim(l, l) == 2);
  CHECK(intersection_dim(LagrangianFrame(unit_columns(2, {0})), LagrangianFrame(unit_columns(2, {1}))) == 0);
  CHECK(intersection_dim(graph_lagrangian(SymMatrix::diagonal(vec({0, 1}))),
                         graph_lagrangian(SymMatrix::zero(2))) == 1);
}

TEST_CASE("graph lagrangian") {
  auto g0 = graph_lagrangian(SymMatrix::zero(2));
  CHECK((g0.projection() - horizontal_lagrangian(2).projection()).norm() < 1e-15);
  auto g1 = graph_lagrangian(SymMatrix::identity(1));
  CHECK(std::abs(std::abs(g1.frame()(0, 0)) - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(g1.frame()(0, 0) - g1.frame()(1, 0)) < 1e-15);

  gen::Rng rng(21);
  for (int k = 0; k < 30; ++k) {
    const int n = 1 + k % 6;
    const int kd = k % n;
    SymMatrix t = kd > 0 ? gen::random_with_kernel(300 + k, n, kd) : SymMatrix(gen::random_symmetric(rng, n));
    auto g = graph_lagrangian(t);
    CHECK(is_lagrangian(g.frame()));
    CHECK(intersection_dim(g, horizontal_lagrangian(n)) == kernel_basis(t).cols());
  }
}

TEST_CASE("principal angles") {
  Matrix a = unit_columns(2, {0});
  Matrix b(2, 1);
  b << std::cos(0.3), std::sin(0.3);
  CHECK(principal_angles(a, b)(0) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("maslov index of single paths") {
  auto h = horizontal_lagrangian(1);
  CHECK(maslov_index(line_path([](double) { return 0.7; }), h).value == 0);

  auto rep = maslov_index(line_path([](double l) { return kPi * (l - 0.5); }), h);
  CHECK(rep.value == 1);
  REQUIRE(rep.crossings.size() == 1);
  CHECK(std::abs(rep.crossings[0].lambda_star - 0.5) < 1e-8);
  CHECK(rep.value == line_oracle(-kPi / 2, kPi / 2));

  CHECK(maslov_index(line_path([](double l) { return -kPi * (l - 0.5); }), h).value == -1);

  for (auto [a, b] : {std::pair{0.2, 3.5}, {0.0, 2 * kPi}, {-0.4, -7.0}, {kPi, 0.1}, {0.3, 2 * kPi}}) {
    auto p = line_path([a, b](double l) { return a + (b - a) * l; });
    CHECK(maslov_index(p, h).value == line_oracle(a, b));
  }
}

TEST_CASE("maslov additivity and reversal") {
  auto h = horizontal_lagrangian(1);
  auto p = line_path([](double l) { return 0.2 + 4.0 * l; });
  const int v = maslov_index(p, h).value;
  for (double cut : {0.25, 0.5, 0.61}) {
    CHECK(maslov_index(restrict_path(p, 0.0, cut), h).value + maslov_index(restrict_path(p, cut, 1.0), h).value ==
          v);
    CHECK(maslov_index(concatenate(restrict_path(p, 0.0, cut), restrict_path(p, cut, 1.0)), h).value == v);
  }
  CHECK(maslov_index(reverse(p), h).value == -v);
}

TEST_CASE("maslov pair index") {
  LagrangianFrame fixed(unit_columns(2, {0}));
  LagrangianFrame other(unit_columns(2, {1}));
  CHECK(maslov_pair_index(constant_lagrangian_path(fixed), constant_lagrangian_path(other)).value == 0);

  // Counterclockwise by 3 pi starting just off the fixed line.
  auto rot = line_path([](double l) { return 0.1 + 3.0 * kPi * l; });
  auto rep = maslov_pair_index(rot, constant_lagrangian_path(fixed));
  CHECK(std::abs(rep.value) == 3);
  CHECK(rep.value == 3);
  CHECK(rep.crossings.size() == 3);

  CHECK_THROWS(maslov_pair_index(constant_lagrangian_path(fixed), constant_lagrangian_path(fixed)));
}

TEST_CASE("graph paths agree with spectral flow") {
  auto scalar = OperatorPath(
      1, [](double l) { return SymMatrix(Matrix::Constant(1, 1, l - 0.5)); },
      [](double) { return SymMatrix(Matrix::Constant(1, 1, 1.0)); });
  CHECK(sfl_via_maslov(scalar) == 1);
  CHECK(sfl_via_maslov(normalization_path(SymMatrix::diagonal(vec({0, 0, 3})))) == 2);
  CHECK(sfl_via_maslov(constant_path(SymMatrix::diagonal(vec({1, -2})))) == 0);

  // Crossing form of the normalization path is positive definite on the kernel.
  auto rep = graph_maslov_report(normalization_path(SymMatrix::diagonal(vec({0, 0, 3}))));
  REQUIRE(rep.crossings.size() == 1);
  CHECK(rep.crossings[0].index.positive == 2);
  CHECK(sfl_via_maslov(restrict_path(normalization_path(SymMatrix::diagonal(vec({0, 0, 3}))), 0.0, 0.5)) == 2);
  CHECK(sfl_via_maslov(restrict_path(normalization_path(SymMatrix::diagonal(vec({0, 0, 3}))), 0.5, 1.0)) == 0);

  for (int k = 0; k < 25; ++k) {
    auto p = gen::generate_operator_path(4000 + k, 1 + k % 6, 1 + k % 3);
    CHECK(sfl_via_maslov(p) == sfl_crossings(p).value);
  }
}

TEST_CASE("random lagrangians") {
  gen::Rng rng(8);
  for (int n = 1; n <= 5; ++n) CHECK(is_lagrangian(gen::random_lagrangian(rng, n)));
}

TEST_CASE("angle trajectory") {
  auto t = angle_trajectory(line_path([](double l) { return l; }), horizontal_lagrangian(1), 4);
  REQUIRE(t.lambdas.size() == 5);
  CHECK(t.angles[2](0) == doctest::Approx(0.5).epsilon(1e-12));
}
