#include <doctest.h>

#include <cmath>

#include "sflow/generators.hpp"
#include "sflow/specflow.hpp"

using namespace sflow;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// Path of diagonal matrices with affine entries a_i + b_i lambda.
OperatorPath affine_diag(std::vector<double> a, std::vector<double> b) {
  const auto n = static_cast<Eigen::Index>(a.size());
  return OperatorPath(
      n,
      [a, b, n](double l) {
        Vector d(n);
        for (Eigen::Index i = 0; i < n; ++i) d(i) = a[i] + b[i] * l;
        return SymMatrix::diagonal(d);
      },
      [b, n](double) {
        Vector d(n);
        for (Eigen::Index i = 0; i < n; ++i) d(i) = b[i];
        return SymMatrix::diagonal(d);
      });
}

// Oracle for diagonal affine paths: net change of the number of
// nonnegative branches between the endpoints.
int branch_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  int total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double v0 = a[i], v1 = a[i] + b[i];
    const bool in0 = v0 >= 0.0, in1 = v1 >= 0.0;
    total += static_cast<int>(in1) - static_cast<int>(in0);
  }
  return total;
}

int both(const OperatorPath& p) {
  const int a = sfl_partition(p).value;
  const int b = sfl_crossings(p).value;
  CHECK(a == b);
  return a;
}

}  // namespace

TEST_CASE("spectral flow examples") {
  CHECK(both(constant_path(SymMatrix::diagonal(vec({1, -1})))) == 0);
  CHECK(both(gen::np_path()) == 1);
  CHECK(both(affine_diag({-0.5, 0.9}, {1, -1})) == branch_oracle({-0.5, 0.9}, {1, -1}));
  CHECK(branch_oracle({-0.5, 0.9}, {1, -1}) == 0);
}

TEST_CASE("crossing method details") {
  auto rep = sfl_crossings(affine_diag({-0.5, 1}, {1, 0}));
  CHECK(rep.value == 1);
  REQUIRE(rep.crossings.size() == 1);
  CHECK(std::abs(rep.crossings[0].lambda_star - 0.5) < 1e-8);
  CHECK(rep.crossings[0].regular);
  REQUIRE(rep.crossings[0].form.dim() == 1);
  CHECK(rep.crossings[0].form(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rep.crossings[0].contribution() == 1);
}

TEST_CASE("normalization path") {
  SymMatrix t = SymMatrix::diagonal(vec({0, 0, 3}));
  auto p = normalization_path(t);
  CHECK(normalization_delta(t) == doctest::Approx(1.5));
  auto rep = sfl_crossings(p);
  CHECK(rep.value == 2);
  REQUIRE(rep.crossings.size() == 1);
  CHECK(std::abs(rep.crossings[0].lambda_star - 0.5) < 1e-8);
  CHECK(rep.crossings[0].kernel.cols() == 2);
  CHECK(sfl_partition(p).value == 2);
  CHECK(both(restrict_path(p, 0.5, 1.0)) == 0);
  CHECK(both(restrict_path(p, 0.0, 0.5)) == 2);

  CHECK(both(normalization_path(SymMatrix::diagonal(vec({1, -1})))) == 0);
  CHECK(both(restrict_path(normalization_path(SymMatrix::diagonal(vec({0, 2}))), 0.5, 1.0)) == 0);
}

TEST_CASE("endpoint crossings follow the Morse index rules") {
  // Starts at 0 and rises: -m^-(+1) = 0. Ends at 0 coming from below: m^-(-1) = 1.
  CHECK(both(affine_diag({0.0}, {1.0})) == 0);
  CHECK(both(affine_diag({-1.0}, {1.0})) == 1);
  // Starts at 0 and falls: -m^-(-1) = -1.
  CHECK(both(affine_diag({0.0}, {-1.0})) == -1);
  CHECK(both(affine_diag({1.0}, {-1.0})) == 0);
}

TEST_CASE("concatenation") {
  auto p = affine_diag({-0.5, 1}, {1, 0});
  CHECK(both(concatenate(p, constant_path(p.eval(1.0)))) == both(p));
  auto q = affine_diag({0.5, 1}, {1, 0});
  CHECK(both(concatenate(p, q)) == 1 + 0);

  auto np = gen::np_path();
  CHECK(both(concatenate(restrict_path(np, 0.0, 0.3), restrict_path(np, 0.3, 1.0))) == 1);

  CHECK_THROWS_AS(concatenate(p, constant_path(SymMatrix::diagonal(vec({5, 5})))), InvalidInput);
}

TEST_CASE("reversal") {
  auto c = constant_path(SymMatrix::diagonal(vec({2, -1})));
  auto rc = reverse(c);
  auto np = gen::np_path();
  auto rnp = reverse(np);
  auto rrnp = reverse(rnp);
  for (double l : {0.0, 0.13, 0.5, 0.77, 1.0}) {
    CHECK(rc.eval(l).matrix() == c.eval(l).matrix());
    CHECK(rrnp.eval(l).matrix() == np.eval(l).matrix());
    CHECK(rnp.eval(l).matrix() == np.eval(1.0 - l).matrix());
  }
  CHECK(both(rnp) == -1);
}

TEST_CASE("riesz transform examples") {
  CHECK(riesz_transform(SymMatrix::zero(3)).matrix().norm() == 0.0);
  CHECK(riesz_transform(SymMatrix::diagonal(vec({1}))).matrix()(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  auto r = riesz_transform(SymMatrix::diagonal(vec({-3, 0, 4}))).matrix();
  CHECK(r(0, 0) == doctest::Approx(-3.0 / std::sqrt(10.0)));
  CHECK(std::abs(r(1, 1)) < 1e-15);
  CHECK(r(2, 2) == doctest::Approx(4.0 / std::sqrt(17.0)));
}

TEST_CASE("riesz path keeps the derivative consistent") {
  auto p = riesz_path(gen::generate_operator_path(17, 4, 3));
  REQUIRE(p.has_deriv());
  auto chk = check_path(p, 32);
  CHECK(chk.deriv_consistent);
}

TEST_CASE("degenerate crossings fail unless perturbation is requested") {
  // The second branch touches zero quadratically at lambda_c: the form diag(1, 0) is degenerate.
  auto touching = [](double lc) {
    return OperatorPath(
        2,
        [lc](double l) { return SymMatrix::diagonal(vec({l - 0.2, 1e6 * (l - lc) * (l - lc)})); },
        [lc](double l) { return SymMatrix::diagonal(vec({1.0, 2e6 * (l - lc)})); });
  };
  auto p = touching(0.2);
  CHECK_THROWS_AS(sfl_crossings(p), DegenerateCrossing);
  SflOptions o;
  o.perturb_degenerate = true;
  auto rep = sfl_crossings(p, o);
  CHECK(rep.diagnostics.perturbed);
  CHECK(rep.diagnostics.perturbation > 0.0);
  CHECK(rep.value == 1);
  CHECK(rep.value == sfl_partition(p).value);

  // At lambda = 1/2 the shift splits the touching root below the resolution.
  CHECK_THROWS_AS(sfl_crossings(touching(0.5), o), NumericalFailure);
}

TEST_CASE("crossing method needs a derivative") {
  OperatorPath p(1, [](double l) { return SymMatrix::diagonal(vec({l - 0.5})); });
  CHECK_THROWS_AS(sfl_crossings(p), InvalidInput);
  CHECK(sfl_partition(p).value == 1);
  auto ev = locate_kernel_events(p);
  REQUIRE(ev.size() == 1);
  CHECK(std::abs(ev[0].lambda - 0.5) < 1e-8);
}

TEST_CASE("partition certificates") {
  auto p = gen::generate_operator_path(42, 4, 3);
  auto rep = sfl_partition(p);
  REQUIRE(!rep.segments.empty());
  CHECK(rep.segments.front().lambda_lo == 0.0);
  CHECK(rep.segments.back().lambda_hi == 1.0);
  int sum = 0;
  for (std::size_t i = 0; i < rep.segments.size(); ++i) {
    const auto& s = rep.segments[i];
    CHECK(s.a > 0.0);
    if (i > 0) CHECK(s.lambda_lo == rep.segments[i - 1].lambda_hi);
    sum += s.count_hi - s.count_lo;
    // Margin certificate at the segment midpoint.
    auto e = sym_eig(p.eval(0.5 * (s.lambda_lo + s.lambda_hi)));
    for (Eigen::Index k = 0; k < e.values.size(); ++k)
      CHECK(std::abs(std::abs(e.values(k)) - s.a) > 0.05 * s.a);
  }
  CHECK(sum == rep.value);
  CHECK(rep.value == sfl_crossings(p).value);
}

TEST_CASE("generated path examples") {
  // Budget 0: D bounded away from 0.
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto p = gen::generate_operator_path(seed, 3, 0);
    double min_abs = 1e300;
    for (int k = 0; k <= 200; ++k)
      min_abs = std::min(min_abs, sym_eig(p.eval(k / 200.0)).values.cwiseAbs().minCoeff());
    CHECK(min_abs > 1e-3);
    CHECK(both(p) == 0);
  }
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto p = gen::constant_kernel_path(seed, 5, 2);
    for (double l : {0.0, 0.31, 0.62, 1.0}) CHECK(kernel_basis(p.eval(l)).cols() == 2);
    CHECK(sfl_partition(p).value == 0);
  }
}

TEST_CASE("property: method agreement, additivity, reversal, Riesz") {
  for (int k = 0; k < 40; ++k) {
    const std::uint64_t seed = 500 + k;
    const int dim = 1 + k % 6;
    auto p = gen::generate_operator_path(seed, dim, 1 + k % 4);
    const int v = sfl_partition(p).value;
    CHECK(sfl_crossings(p).value == v);
    CHECK(sfl_partition(reverse(p)).value == -v);
    CHECK(sfl_partition(riesz_path(p)).value == v);
    const double cut = 0.2 + 0.6 * gen::Rng(seed).uniform();
    auto a = restrict_path(p, 0.0, cut), b = restrict_path(p, cut, 1.0);
    CHECK(sfl_partition(a).value + sfl_partition(b).value == v);
  }
}

TEST_CASE("property: homotopy formula in every mode") {
  using gen::HomotopyMode;
  for (auto mode : {HomotopyMode::generic, HomotopyMode::free_loop, HomotopyMode::fixed_edge,
                    HomotopyMode::invertible_edge}) {
    for (int k = 0; k < 6; ++k) {
      auto h = gen::generate_homotopy(900 + k, 1 + k % 4, mode);
      const int left = sfl_partition(h.lambda_path(0.0)).value;
      const int right = sfl_partition(h.lambda_path(1.0)).value;
      const int bottom = sfl_partition(h.s_path(0.0)).value;
      const int top = sfl_partition(h.s_path(1.0)).value;
      CHECK(left == bottom + right - top);
      if (mode == HomotopyMode::free_loop) CHECK(left == right);
      if (mode == HomotopyMode::fixed_edge || mode == HomotopyMode::invertible_edge) {
        CHECK(bottom == 0);
        CHECK(top == 0);
      }
    }
  }
  CHECK(gen::homotopy_mode_from_string(gen::to_string(HomotopyMode::fixed_edge)) == HomotopyMode::fixed_edge);
  CHECK_THROWS_AS(gen::homotopy_mode_from_string("nope"), InvalidInput);
}

TEST_CASE("check_path statistics") {
  auto chk = check_path(gen::np_path(), 16);
  CHECK(chk.lipschitz == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(chk.deriv_consistent);

  OperatorPath wrong(
      1, [](double l) { return SymMatrix::diagonal(vec({l})); },
      [](double) { return SymMatrix::diagonal(vec({-1})); });
  CHECK_FALSE(check_path(wrong, 16).deriv_consistent);
}

TEST_CASE("eigenvalue trajectory") {
  auto t = eigenvalue_trajectory(gen::np_path(), 4);
  REQUIRE(t.lambdas.size() == 5);
  CHECK(t.lambdas.back() == 1.0);
  CHECK(t.values[0](0) == doctest::Approx(-1.0));
  CHECK(t.values[0](1) == doctest::Approx(-0.5));
}
