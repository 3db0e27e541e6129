#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include <butterfly/dense.hpp>
#include <butterfly/rng.hpp>

using namespace butterfly;

namespace {

DenseMatrix random_matrix(std::size_t r, std::size_t c, Rng& rng) {
  DenseMatrix m(r, c, Field::Complex);
  for (Cx& e : m.entries) e = Cx{rng.gaussian(0.0, 1.0), rng.gaussian(0.0, 1.0)};
  return m;
}

std::vector<Cx> random_vector(std::size_t n, Rng& rng) {
  std::vector<Cx> x(n);
  for (Cx& e : x) e = Cx{rng.gaussian(0.0, 1.0), rng.gaussian(0.0, 1.0)};
  return x;
}

}  // namespace

TEST_CASE("dense_matvec identity and swap") {
  DenseMatrix id = DenseMatrix::identity(3);
  std::vector<Cx> x{{1, 0}, {2, 0}, {3, 0}};
  auto y = dense_matvec(id, x);
  CHECK(y[0] == Cx{1, 0});
  CHECK(y[1] == Cx{2, 0});
  CHECK(y[2] == Cx{3, 0});

  DenseMatrix swap(2, 2);
  swap.at(0, 1) = Cx{1, 0};
  swap.at(1, 0) = Cx{1, 0};
  std::vector<Cx> ab{{4, 1}, {7, -2}};
  auto s = dense_matvec(swap, ab);
  CHECK(s[0] == ab[1]);
  CHECK(s[1] == ab[0]);
}

TEST_CASE("dense_matvec on the unitary F2") {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  DenseMatrix f2(2, 2);
  f2.at(0, 0) = f2.at(0, 1) = f2.at(1, 0) = Cx{inv_sqrt2, 0};
  f2.at(1, 1) = Cx{-inv_sqrt2, 0};
  auto y = dense_matvec(f2, std::vector<Cx>{{1, 0}, {0, 0}});
  CHECK(std::abs(y[0] - Cx{inv_sqrt2, 0}) < 1e-15);
  CHECK(std::abs(y[1] - Cx{inv_sqrt2, 0}) < 1e-15);
}

TEST_CASE("dense_matvec rejects dimension mismatch") {
  DenseMatrix a(3, 2);
  std::vector<Cx> x(3);
  CHECK_THROWS_AS(dense_matvec(a, x), std::invalid_argument);
}

TEST_CASE("dense_matvec is linear") {
  Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    DenseMatrix a = random_matrix(8, 8, rng);
    auto x = random_vector(8, rng);
    auto y = random_vector(8, rng);
    std::vector<Cx> xy(8);
    for (std::size_t i = 0; i < 8; ++i) xy[i] = x[i] + y[i];
    auto lhs = dense_matvec(a, xy);
    auto ax = dense_matvec(a, x);
    auto ay = dense_matvec(a, y);
    for (std::size_t i = 0; i < 8; ++i) ax[i] += ay[i];
    CHECK(max_abs_diff(lhs, ax) < 1e-12 * (norm2(x) + norm2(y)));
  }
}

TEST_CASE("frobenius_rmse pinned values") {
  DenseMatrix i2 = DenseMatrix::identity(2);
  CHECK(frobenius_rmse(i2, i2) == 0.0);
  DenseMatrix z2(2, 2);
  CHECK(frobenius_rmse(i2, z2) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  DenseMatrix a(1, 1), b(1, 1);
  a.at(0, 0) = Cx{1, 0};
  b.at(0, 0) = Cx{1, 0.003};
  CHECK(frobenius_rmse(a, b) == doctest::Approx(0.003).epsilon(1e-12));
}

TEST_CASE("frobenius_rmse rejects shape mismatch") {
  DenseMatrix a(2, 2), b(2, 3);
  CHECK_THROWS_AS(frobenius_rmse(a, b), std::invalid_argument);
}

TEST_CASE("frobenius_rmse is a metric up to floating error") {
  Rng rng(21);
  for (int rep = 0; rep < 10; ++rep) {
    DenseMatrix a = random_matrix(6, 6, rng);
    DenseMatrix b = random_matrix(6, 6, rng);
    DenseMatrix c = random_matrix(6, 6, rng);
    CHECK(frobenius_rmse(a, b) == frobenius_rmse(b, a));
    CHECK(frobenius_rmse(a, c) <= frobenius_rmse(a, b) + frobenius_rmse(b, c) + 1e-12);
    CHECK(frobenius_rmse(a, a) == 0.0);
  }
}

TEST_CASE("matmul against hand products and adjoint identity") {
  Rng rng(31);
  DenseMatrix a = random_matrix(4, 3, rng);
  DenseMatrix b = random_matrix(3, 5, rng);
  DenseMatrix ab = matmul(a, b);
  CHECK(ab.rows == 4);
  CHECK(ab.cols == 5);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 5; ++j) {
      Cx sum{0, 0};
      for (std::size_t k = 0; k < 3; ++k) sum += a.at(i, k) * b.at(k, j);
      CHECK(std::abs(ab.at(i, j) - sum) < 1e-13);
    }
  // (AB)^H = B^H A^H
  DenseMatrix lhs = conj_transpose(ab);
  DenseMatrix rhs = matmul(conj_transpose(b), conj_transpose(a));
  CHECK(max_abs_diff(lhs, rhs) < 1e-12);
}

TEST_CASE("subtract, real_part and norm helpers") {
  DenseMatrix a(2, 2), b(2, 2);
  a.at(0, 0) = Cx{3, 4};
  b.at(0, 0) = Cx{1, 1};
  DenseMatrix d = subtract(a, b);
  CHECK(d.at(0, 0) == Cx{2, 3});
  DenseMatrix r = real_part(a);
  CHECK(r.at(0, 0) == Cx{3, 0});
  CHECK(r.is_real());
  CHECK(max_abs(a) == doctest::Approx(5.0));
  CHECK(max_abs_imag(a) == doctest::Approx(4.0));
  CHECK(frobenius_norm(a) == doctest::Approx(5.0));
  CHECK(max_abs_diff(a, b) == doctest::Approx(std::abs(Cx{2, 3})));
}

TEST_CASE("field tag semantics") {
  DenseMatrix m(2, 2, Field::Real);
  CHECK(m.field == Field::Real);
  CHECK(m.is_real());
  m.at(1, 1) = Cx{0.0, 1e-3};
  CHECK_FALSE(m.is_real());
  CHECK(m.is_real(1e-2));
}
