#include <doctest.h>

#include <cmath>

#include "sflow/gapmetric.hpp"
#include "sflow/generators.hpp"

using namespace sflow;

namespace {

SymMatrix scalar(double x) { return SymMatrix(Matrix::Constant(1, 1, x)); }

// Projection onto the line through (1, m) in R^2.
Eigen::Matrix2d line_projection(double m) {
  Eigen::Vector2d v(1.0, m);
  v.normalize();
  return v * v.transpose();
}

}  // namespace

TEST_CASE("graph projection examples") {
  auto p0 = graph_projection(scalar(0.0));
  CHECK((p0.proj - (Matrix(2, 2) << 1, 0, 0, 0).finished()).norm() < 1e-15);
  auto p1 = graph_projection(scalar(1.0));
  CHECK((p1.proj - Matrix::Constant(2, 2, 0.5)).norm() < 1e-15);
  auto pi = graph_projection(SymMatrix::identity(2));
  CHECK(pi.proj.rows() == 4);
  CHECK(std::round(pi.proj.trace()) == 2.0);
}

TEST_CASE("graph projection invariants") {
  gen::Rng rng(31);
  for (int k = 0; k < 100; ++k) {
    const int n = 1 + k % 8;
    SymMatrix m(gen::random_symmetric(rng, n, rng.uniform(0.1, 5.0)));
    auto g = graph_projection(m);
    CHECK((g.proj * g.proj - g.proj).norm() <= 1e-10 * n);
    CHECK((g.proj - g.proj.transpose()).norm() <= 1e-10);
    CHECK(std::abs(g.proj.trace() - n) <= 1e-10);
    Vector u(n);
    for (int i = 0; i < n; ++i) u(i) = rng.uniform(-1, 1);
    Vector w(2 * n);
    w << u, m.matrix() * u;
    CHECK((g.proj * w - w).norm() <= 1e-10 * w.norm());
  }
}

TEST_CASE("gap distance examples") {
  gen::Rng rng(1);
  SymMatrix t(gen::random_symmetric(rng, 4));
  CHECK(gap_distance(t, t) < 1e-14);
  CHECK(gap_delta(t, t) < 1e-14);
  CHECK(gap_distance(scalar(0), scalar(1)) == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-13));
  CHECK(gap_delta(scalar(0), scalar(1)) == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-13));
  CHECK(gap_delta(scalar(1), scalar(0)) == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-13));
}

TEST_CASE("scalar closed form") {
  gen::Rng rng(77);
  for (int k = 0; k < 200; ++k) {
    const double t = std::tan(rng.uniform(-1.5, 1.5)), s = std::tan(rng.uniform(-1.5, 1.5));
    const double oracle = std::abs(std::sin(std::atan(t) - std::atan(s)));
    // Independent route: 2x2 projections onto the two lines.
    Eigen::Matrix2d diff = line_projection(t) - line_projection(s);
    const double via_lines = diff.jacobiSvd().singularValues()(0);
    CHECK(std::abs(oracle - via_lines) < 1e-12);
    CHECK(std::abs(gap_distance(scalar(t), scalar(s)) - oracle) < 1e-12);
  }
}

TEST_CASE("metric axioms and the one-sided identity") {
  gen::Rng rng(13);
  for (int k = 0; k < 300; ++k) {
    const int n = 1 + k % 8;
    SymMatrix t(gen::random_symmetric(rng, n, 3.0)), s(gen::random_symmetric(rng, n, 3.0)),
        r(gen::random_symmetric(rng, n, 3.0));
    const double ts = gap_distance(t, s);
    CHECK(ts == gap_distance(s, t));
    CHECK(ts <= 1.0 + 1e-15);
    CHECK(gap_distance(t, r) <= ts + gap_distance(s, r) + 1e-10);
    CHECK(std::abs(std::max(gap_delta(t, s), gap_delta(s, t)) - ts) <= 1e-10);
  }
}

TEST_CASE("perturbation inequality") {
  auto same = perturbation_inequality_check(scalar(0.3), scalar(0.3), scalar(2), scalar(2));
  CHECK(same.lhs < 1e-14);
  CHECK(same.holds);

  auto ex = perturbation_inequality_check(scalar(0), scalar(0), scalar(0), scalar(1));
  CHECK(ex.lhs == doctest::Approx(std::sqrt(2.0) / 2));
  CHECK(ex.rhs == doctest::Approx(4.0));
  CHECK(ex.holds);
  CHECK(ex.slack > 3.0);

  gen::Rng rng(99);
  for (int k = 0; k < 200; ++k) {
    const int n = 1 + k % 8;
    auto c = perturbation_inequality_check(SymMatrix(gen::random_symmetric(rng, n, 4)),
                                           SymMatrix(gen::random_symmetric(rng, n, 4)),
                                           SymMatrix(gen::random_symmetric(rng, n)),
                                           SymMatrix(gen::random_symmetric(rng, n)));
    CHECK(c.holds);
    CHECK(c.slack >= -1e-9);
  }
}

TEST_CASE("gap continuity along converging sequences") {
  gen::Rng rng(4);
  for (int k = 0; k < 20; ++k) {
    const int n = 1 + k % 5;
    SymMatrix m(gen::random_symmetric(rng, n, 5));
    SymMatrix e(gen::random_symmetric(rng, n));
    double prev = 2.0;
    for (int j = 1; j <= 8; ++j) {
      const double d = gap_distance(m + std::pow(10.0, -j) * e, m);
      CHECK(d <= prev + 1e-15);
      prev = d;
    }
    CHECK(prev < 1e-7);
  }
}

TEST_CASE("dimension mismatch") {
  CHECK_THROWS_AS(gap_distance(SymMatrix::identity(2), SymMatrix::identity(3)), InvalidInput);
}
