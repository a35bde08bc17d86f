#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "xorcop/datasets.hpp"
#include "xorcop/error.hpp"
#include "xorcop/linalg.hpp"

using namespace xorcop;

namespace {

// Column-at-a-time product; deliberately a different loop order from the library.
Matrix naive_product(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    for (std::size_t i = 0; i < a.rows(); ++i) {
      long double acc = 0.0L;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += static_cast<long double>(a(i, k)) * b(k, j);
      c(i, j) = static_cast<double>(acc);
    }
  }
  return c;
}

Matrix random_matrix(gen::Rng& rng, std::size_t r, std::size_t c) {
  Matrix m(r, c);
  for (double& v : m.data()) v = gen::uniform(rng, -3.0, 3.0);
  return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  }
  return worst;
}

}  // namespace

TEST_CASE("matrix construction validates shape and values") {
  CHECK_THROWS_AS(Matrix(0, 3), ShapeError);
  CHECK_THROWS_AS(Matrix(2, 2, std::vector<double>{1, 2, 3}), ShapeError);
  CHECK_THROWS_AS((Matrix{{1, 2}, {3}}), ShapeError);
  CHECK_THROWS_AS(Matrix(1, 1, std::nan("")), DomainError);
  CHECK_THROWS_AS(Matrix(2, 2).at(2, 0), ShapeError);
  CHECK(Matrix().empty());
  CHECK(Matrix::identity(3)(1, 1) == 1.0);
  CHECK(Matrix::identity(3)(1, 2) == 0.0);
}

TEST_CASE("mat_mul examples") {
  const Matrix a{{1, 2}, {3, 4}};
  CHECK(mat_mul(a, Matrix::identity(2)) == a);
  CHECK(mat_mul(a, Matrix{{5}, {6}}) == Matrix{{17}, {39}});
  CHECK_THROWS_AS(mat_mul(a, Matrix(3, 1)), ShapeError);
}

TEST_CASE("mat_mul agrees with an independent product on random shapes") {
  gen::Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + gen::index(rng, 6), k = 1 + gen::index(rng, 6), m = 1 + gen::index(rng, 6);
    const Matrix a = random_matrix(rng, n, k);
    const Matrix b = random_matrix(rng, k, m);
    CHECK(max_abs_diff(mat_mul(a, b), naive_product(a, b)) < 1e-12);
  }
}

TEST_CASE("transpose and add") {
  const Matrix a{{1, 2, 3}, {4, 5, 6}};
  CHECK(transpose(a) == Matrix{{1, 4}, {2, 5}, {3, 6}});
  CHECK(transpose(transpose(a)) == a);
  CHECK(mat_add(a, a) == Matrix{{2, 4, 6}, {8, 10, 12}});
  CHECK_THROWS_AS(mat_add(a, transpose(a)), ShapeError);
}

TEST_CASE("mat_inverse") {
  const Matrix a{{4, 7}, {2, 6}};
  const Matrix inv = mat_inverse(a);
  CHECK(inv(0, 0) == doctest::Approx(0.6));
  CHECK(inv(0, 1) == doctest::Approx(-0.7));
  CHECK(inv(1, 0) == doctest::Approx(-0.2));
  CHECK(inv(1, 1) == doctest::Approx(0.4));
  CHECK_THROWS_AS(mat_inverse(Matrix{{1, 2}, {2, 4}}), SingularMatrixError);
  CHECK_THROWS_AS(mat_inverse(Matrix(2, 3)), ShapeError);

  SUBCASE("A * inv(A) is the identity for well-conditioned random matrices") {
    gen::Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 1 + gen::index(rng, 5);
      Matrix m = random_matrix(rng, n, n);
      for (std::size_t i = 0; i < n; ++i) m(i, i) += 10.0;  // diagonally dominant
      CHECK(max_abs_diff(naive_product(m, mat_inverse(m)), Matrix::identity(n)) < 1e-12);
    }
  }
}

TEST_CASE("least squares on the Boolean tables") {
  SUBCASE("xor: flat plane at one half, SSE 1") {
    const auto [x, t] = regression_arrays(builtin("boolean_xor"));
    const Matrix w = least_squares(x, t);
    CHECK(w(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(w(0, 1)) < 1e-12);
    CHECK(std::abs(w(0, 2) - 0.5) < 1e-12);
    CHECK(std::abs(least_squares_sse(w, x, t) - 1.0) < 1e-12);
  }
  SUBCASE("xor with the product feature is exact") {
    const auto [x, t] = regression_arrays(builtin("boolean_xor"), 0, true);
    const Matrix w = least_squares(x, t);
    CHECK(std::abs(w(0, 0) - 1.0) < 1e-12);
    CHECK(std::abs(w(0, 1) - 1.0) < 1e-12);
    CHECK(std::abs(w(0, 2) + 2.0) < 1e-12);
    CHECK(std::abs(w(0, 3)) < 1e-12);
    CHECK(least_squares_sse(w, x, t) < 1e-20);
  }
  SUBCASE("and / or discriminants") {
    const auto [xa, ta] = regression_arrays(builtin("boolean_and"));
    const Matrix wa = least_squares(xa, ta);
    CHECK(std::abs(wa(0, 0) - 0.5) < 1e-12);
    CHECK(std::abs(wa(0, 1) - 0.5) < 1e-12);
    CHECK(std::abs(wa(0, 2) + 0.25) < 1e-12);
    const auto [xo, to] = regression_arrays(builtin("boolean_or"));
    const Matrix wo = least_squares(xo, to);
    CHECK(std::abs(wo(0, 2) - 0.25) < 1e-12);
  }
}

TEST_CASE("least squares errors") {
  Matrix x{{1, 1, 1}, {1, 1, 1}};  // input row identical to the bias row
  CHECK_THROWS_AS(least_squares(x, Matrix{{0, 1, 0}}), RankDeficientError);
  CHECK_THROWS_AS(least_squares(Matrix{{0, 1}, {2, 1}}, Matrix{{0, 1}}), DomainError);
  CHECK_THROWS_AS(least_squares(Matrix{{0, 1}, {1, 1}}, Matrix{{0, 1, 1}}), ShapeError);
}

TEST_CASE("least squares residual is orthogonal to every input row") {
  // Normal-equation oracle: X (X^T w^T - t^T) = 0 at the optimum.
  gen::Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 1 + gen::index(rng, 3);
    const std::size_t n = k + 2 + gen::index(rng, 8);
    Matrix x = random_matrix(rng, k + 1, n);
    for (std::size_t j = 0; j < n; ++j) x(k, j) = 1.0;
    const Matrix t = random_matrix(rng, 1, n);
    const Matrix w = least_squares(x, t);
    const Matrix residual = mat_add(mat_mul(w, x), Matrix(1, n, 0.0));
    for (std::size_t i = 0; i <= k; ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < n; ++j) dot += x(i, j) * (residual(0, j) - t(0, j));
      CHECK(std::abs(dot) < 1e-9);
    }
    // Perturbing the optimum never lowers the SSE.
    const double best = least_squares_sse(w, x, t);
    Matrix nudged = w;
    nudged(0, gen::index(rng, k + 1)) += gen::uniform(rng, -0.1, 0.1);
    CHECK(least_squares_sse(nudged, x, t) >= best - 1e-12);
  }
}
