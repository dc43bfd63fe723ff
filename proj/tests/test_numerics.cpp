#include <doctest.h>

#include <cmath>

#include "sflow/generators.hpp"
#include "sflow/numerics.hpp"

using namespace sflow;

namespace {

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST_CASE("SymMatrix symmetrizes on construction") {
  SymMatrix s(mat({{1, 2}, {4, 3}}));
  CHECK(s(0, 1) == 3.0);
  CHECK(s(1, 0) == 3.0);
  CHECK((s.matrix() - s.matrix().transpose()).norm() == 0.0);
}

TEST_CASE("sym_eig examples") {
  auto e1 = sym_eig(SymMatrix::diagonal(vec({3, 1, 2})));
  CHECK((e1.values - vec({1, 2, 3})).norm() < 1e-14);

  auto e2 = sym_eig(SymMatrix::identity(4));
  CHECK((e2.values - Vector::Ones(4)).norm() < 1e-14);

  // lambda^2 - 1 = 0
  auto e3 = sym_eig(SymMatrix(mat({{0, 1}, {1, 0}})));
  CHECK(e3.values(0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(e3.values(1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("sym_eig reconstruction and orthogonality on random input") {
  gen::Rng rng(2024);
  for (int k = 0; k < 1000; ++k) {
    const int dim = 1 + k % 12;
    SymMatrix m(gen::random_symmetric(rng, dim, rng.uniform(0.1, 10.0)));
    auto e = sym_eig(m);
    Matrix rec = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
    REQUIRE((rec - m.matrix()).norm() <= 1e-10 * scale_of(m));
    REQUIRE((e.vectors.transpose() * e.vectors - Matrix::Identity(dim, dim)).norm() <= 1e-12 * dim);
    for (int i = 1; i < dim; ++i) REQUIRE(e.values(i - 1) <= e.values(i));
  }
}

TEST_CASE("sym_eig is bit-reproducible") {
  gen::Rng rng(7);
  SymMatrix m(gen::random_symmetric(rng, 9));
  auto a = sym_eig(m);
  auto b = sym_eig(m);
  CHECK(a.values == b.values);
  CHECK(a.vectors == b.vectors);
}

TEST_CASE("kernel_basis examples") {
  CHECK(kernel_basis(SymMatrix::diagonal(vec({0, 0, 3})), 1e-9).cols() == 2);
  CHECK(kernel_basis(SymMatrix::identity(3)).cols() == 0);

  Matrix k = kernel_basis(SymMatrix(mat({{1, 1}, {1, 1}})));
  REQUIRE(k.cols() == 1);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(std::abs(k(0, 0)) - r) < 1e-12);
  CHECK(std::abs(k(0, 0) + k(1, 0)) < 1e-12);
}

TEST_CASE("kernel_basis columns are null vectors") {
  gen::Rng rng(11);
  for (int k = 0; k < 50; ++k) {
    const int dim = 2 + k % 6;
    const int kd = 1 + k % (dim - 1);
    SymMatrix t = gen::random_with_kernel(1000 + k, dim, kd);
    Matrix b = kernel_basis(t);
    REQUIRE(b.cols() == kd);
    CHECK((t.matrix() * b).norm() <= 1e-9 * scale_of(t));
  }
}

TEST_CASE("operator_norm examples") {
  CHECK(operator_norm(Matrix::Zero(3, 3)) == 0.0);
  CHECK(operator_norm(SymMatrix::diagonal(vec({-5, 2})).matrix()) == doctest::Approx(5.0).epsilon(1e-14));
  // Jordan block: singular values 1 and 0.
  CHECK(operator_norm(mat({{0, 1}, {0, 0}})) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("operator_norm of the transpose") {
  gen::Rng rng(3);
  for (int k = 0; k < 200; ++k) {
    const int r = rng.integer(1, 8), c = rng.integer(1, 8);
    Matrix m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = rng.uniform(-1, 1);
    CHECK(std::abs(operator_norm(m) - operator_norm(m.transpose())) <= 1e-12);
  }
}

TEST_CASE("quadform_index examples") {
  auto q1 = quadform_index(SymMatrix::diagonal(vec({-1, 2, -3})));
  CHECK(q1.negative == 2);
  CHECK(q1.signature() == -1);
  CHECK_FALSE(q1.degenerate());

  CHECK(quadform_index(SymMatrix::diagonal(vec({0, 1})), 1e-9).degenerate());

  // eigenvalues 1 and 3
  auto q3 = quadform_index(SymMatrix(mat({{2, 1}, {1, 2}})));
  CHECK(q3.negative == 0);
  CHECK(q3.signature() == 2);
}

TEST_CASE("quadform_index invariants") {
  gen::Rng rng(5);
  for (int k = 0; k < 300; ++k) {
    const int dim = 1 + k % 9;
    SymMatrix q(gen::random_symmetric(rng, dim));
    auto idx = quadform_index(q);
    auto neg = quadform_index(-q);
    CHECK(idx.negative + idx.positive + idx.null == dim);
    CHECK(std::abs(idx.signature()) + 2 * std::min(idx.positive, idx.negative) <= dim);
    CHECK(neg.negative == idx.positive);
  }
}

TEST_CASE("orthonormalize examples") {
  CHECK((orthonormalize(Matrix::Identity(3, 3)) - Matrix::Identity(3, 3)).norm() < 1e-15);

  Matrix one = orthonormalize(mat({{3}, {4}}));
  CHECK(std::abs(std::abs(one(0, 0)) - 0.6) < 1e-15);
  CHECK(std::abs(std::abs(one(1, 0)) - 0.8) < 1e-15);
  CHECK(one(0, 0) * one(1, 0) > 0.0);

  Matrix two = orthonormalize(mat({{1, 1}, {0, 1}}));
  CHECK((two.transpose() * two - Matrix::Identity(2, 2)).norm() < 1e-14);
  CHECK(std::abs(two.determinant()) == doctest::Approx(1.0));

  CHECK_THROWS_AS(orthonormalize(mat({{1, 2}, {1, 2}})), InvalidInput);
}

TEST_CASE("thin_qr reproduces the frame") {
  gen::Rng rng(9);
  Matrix f(6, 3);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 3; ++j) f(i, j) = rng.uniform(-1, 1);
  auto qr = thin_qr(f);
  CHECK((qr.q * qr.r - f).norm() < 1e-13);
  CHECK((qr.q.transpose() * qr.q - Matrix::Identity(3, 3)).norm() < 1e-13);
}
