#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include <butterfly/butterfly_stack.hpp>
#include <butterfly/dense.hpp>
#include <butterfly/rng.hpp>

using namespace butterfly;

namespace {

std::vector<Cx> random_vector(std::size_t n, Rng& rng) {
  std::vector<Cx> x(n);
  for (Cx& e : x) e = Cx{rng.gaussian(0.0, 1.0), rng.gaussian(0.0, 1.0)};
  return x;
}

}  // namespace

TEST_CASE("parameter count is 4N - 4") {
  Rng rng(1);
  CHECK(ButterflyStack::random(2, Field::Real, rng).param_count() == 4);
  CHECK(ButterflyStack::random(8, Field::Complex, rng).param_count() == 28);
  CHECK(ButterflyStack::random(64, Field::Complex, rng).param_count() == 252);
  // Stored diagonals sum to the same count.
  ButterflyStack st = ButterflyStack::random(16, Field::Complex, rng);
  std::size_t stored = 0;
  for (std::size_t l = 0; l < st.num_levels(); ++l)
    stored += st.level(l).d1.size() + st.level(l).d2.size() + st.level(l).d3.size() +
              st.level(l).d4.size();
  CHECK(stored == st.param_count());
}

TEST_CASE("identity stack is the identity operator") {
  ButterflyStack id = ButterflyStack::identity(8, Field::Complex);
  Rng rng(2);
  auto x = random_vector(8, rng);
  auto y = id.fast_multiply(x);
  CHECK(max_abs_diff(std::span<const Cx>(x), std::span<const Cx>(y)) == 0.0);
  CHECK(max_abs_diff(id.expand_dense(), DenseMatrix::identity(8)) == 0.0);
}

TEST_CASE("N = 2 block installs verbatim") {
  ButterflyLevel lev;
  lev.d1 = {Cx{1, 0}};
  lev.d2 = {Cx{1, 0}};
  lev.d3 = {Cx{1, 0}};
  lev.d4 = {Cx{-1, 0}};
  ButterflyStack st = ButterflyStack::from_levels(2, Field::Real, {lev});
  DenseMatrix d = st.expand_dense();
  CHECK(d.at(0, 0) == Cx{1, 0});
  CHECK(d.at(0, 1) == Cx{1, 0});
  CHECK(d.at(1, 0) == Cx{1, 0});
  CHECK(d.at(1, 1) == Cx{-1, 0});
}

TEST_CASE("levels are tied: one block copy per level, replicated on expansion") {
  Rng rng(3);
  ButterflyStack st = ButterflyStack::random(8, Field::Complex, rng);
  // Zero all levels but level 0 (block size 2): the expansion must be block
  // diagonal with four identical 2x2 blocks.
  ButterflyStack one = ButterflyStack::identity(8, Field::Complex);
  one.level(0) = st.level(0);
  DenseMatrix d = one.expand_dense();
  for (std::size_t b = 1; b < 4; ++b)
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        CHECK(d.at(2 * b + i, 2 * b + j) == d.at(i, j));
}

TEST_CASE("a single level factor has two structural nonzeros per row and column") {
  Rng rng(4);
  for (std::size_t lev = 0; lev < 3; ++lev) {
    ButterflyStack st = ButterflyStack::random(8, Field::Complex, rng);
    ButterflyStack one = ButterflyStack::identity(8, Field::Complex);
    one.level(lev) = st.level(lev);
    DenseMatrix d = one.expand_dense();
    std::size_t nonzeros = 0;
    for (std::size_t i = 0; i < 8; ++i) {
      std::size_t row = 0, col = 0;
      for (std::size_t j = 0; j < 8; ++j) {
        if (std::abs(d.at(i, j)) != 0.0) ++row;
        if (std::abs(d.at(j, i)) != 0.0) ++col;
      }
      CHECK(row == 2);
      CHECK(col == 2);
      nonzeros += row;
    }
    CHECK(nonzeros == 16);  // 2N slots
  }
}

TEST_CASE("fast_multiply equals the dense expansion across sizes") {
  Rng rng(5);
  for (std::size_t n = 2; n <= 256; n *= 2) {
    ButterflyStack st = ButterflyStack::random(n, Field::Complex, rng);
    DenseMatrix d = st.expand_dense();
    const double lg = std::log2(double(n));
    for (int rep = 0; rep < 5; ++rep) {
      auto x = random_vector(n, rng);
      auto fast = st.fast_multiply(x);
      auto slow = dense_matvec(d, x);
      CHECK(max_abs_diff(std::span<const Cx>(fast), std::span<const Cx>(slow)) <
            1e-12 * norm2(x) * lg);
    }
  }
}

TEST_CASE("fast_multiply applied to a basis vector picks the matching column") {
  Rng rng(6);
  ButterflyStack st = ButterflyStack::random(16, Field::Complex, rng);
  std::vector<Cx> e3(16, Cx{0, 0});
  e3[3] = Cx{1, 0};
  auto y = st.fast_multiply(e3);
  DenseMatrix d = st.expand_dense();
  for (std::size_t i = 0; i < 16; ++i)
    CHECK(std::abs(y[i] - d.at(i, 3)) < 1e-13);
}

TEST_CASE("fast_multiply is linear") {
  Rng rng(7);
  ButterflyStack st = ButterflyStack::random(32, Field::Complex, rng);
  auto x = random_vector(32, rng);
  auto y = random_vector(32, rng);
  const Cx alpha{0.7, -0.2}, beta{-1.3, 0.4};
  std::vector<Cx> mix(32);
  for (std::size_t i = 0; i < 32; ++i) mix[i] = alpha * x[i] + beta * y[i];
  auto lhs = st.fast_multiply(mix);
  auto fx = st.fast_multiply(x);
  auto fy = st.fast_multiply(y);
  for (std::size_t i = 0; i < 32; ++i) fx[i] = alpha * fx[i] + beta * fy[i];
  CHECK(max_abs_diff(std::span<const Cx>(lhs), std::span<const Cx>(fx)) <
        1e-12 * (norm2(x) + norm2(y)));
}

TEST_CASE("apply_level in ascending order reproduces fast_multiply") {
  Rng rng(8);
  ButterflyStack st = ButterflyStack::random(16, Field::Complex, rng);
  auto x = random_vector(16, rng);
  std::vector<Cx> buf = x;
  for (std::size_t l = 0; l < st.num_levels(); ++l) st.apply_level(l, buf);
  auto fast = st.fast_multiply(x);
  CHECK(max_abs_diff(std::span<const Cx>(buf), std::span<const Cx>(fast)) == 0.0);
}

TEST_CASE("random init matches the stated variances") {
  // Real field: each entry N(0, 1/2).  Complex: re and im each N(0, 1/4).
  Rng rng(9);
  double sum2_re = 0.0;
  std::size_t count = 0;
  for (int rep = 0; rep < 2000; ++rep) {
    ButterflyStack st = ButterflyStack::random(8, Field::Real, rng);
    for (std::size_t l = 0; l < st.num_levels(); ++l)
      for (const auto* d : {&st.level(l).d1, &st.level(l).d2, &st.level(l).d3,
                            &st.level(l).d4})
        for (const Cx& e : *d) {
          CHECK(e.imag() == 0.0);
          sum2_re += e.real() * e.real();
          ++count;
        }
  }
  CHECK(sum2_re / double(count) == doctest::Approx(0.5).epsilon(0.03));

  double sum2_c = 0.0;
  std::size_t count_c = 0;
  for (int rep = 0; rep < 2000; ++rep) {
    ButterflyStack st = ButterflyStack::random(8, Field::Complex, rng);
    for (std::size_t l = 0; l < st.num_levels(); ++l)
      for (const auto* d : {&st.level(l).d1, &st.level(l).d2, &st.level(l).d3,
                            &st.level(l).d4})
        for (const Cx& e : *d) {
          sum2_c += std::norm(e);
          ++count_c;
        }
  }
  // E|e|^2 = 1/4 + 1/4
  CHECK(sum2_c / double(count_c) == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("random init is norm preserving in expectation") {
  // E[L* L] = I per level: Monte Carlo within 3%.
  Rng rng(10);
  const std::size_t n = 4;
  for (std::size_t lev = 0; lev < 2; ++lev) {
    DenseMatrix acc(n, n, Field::Complex);
    const int draws = 10000;
    for (int d = 0; d < draws; ++d) {
      ButterflyStack st = ButterflyStack::random(n, Field::Complex, rng);
      ButterflyStack one = ButterflyStack::identity(n, Field::Complex);
      one.level(lev) = st.level(lev);
      DenseMatrix l = one.expand_dense();
      DenseMatrix prod = matmul(conj_transpose(l), l);
      for (std::size_t i = 0; i < acc.entries.size(); ++i)
        acc.entries[i] += prod.entries[i] / double(draws);
    }
    CHECK(max_abs_diff(acc, DenseMatrix::identity(n)) < 0.03);
  }
}

TEST_CASE("random init is deterministic in the rng state") {
  Rng a(77), b(77);
  ButterflyStack sa = ButterflyStack::random(16, Field::Complex, a);
  ButterflyStack sb = ButterflyStack::random(16, Field::Complex, b);
  CHECK(max_abs_diff(sa.expand_dense(), sb.expand_dense()) == 0.0);
}
