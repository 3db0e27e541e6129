#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <butterfly/rng.hpp>

using namespace butterfly;

TEST_CASE("splitmix64 matches the reference sequence from state 0") {
  std::uint64_t state = 0;
  const std::uint64_t a = splitmix64_next(state);
  const std::uint64_t b = splitmix64_next(state);
  const std::uint64_t c = splitmix64_next(state);
  CHECK(a == 0xe220a8397b1dcdafULL);
  CHECK(b == 0x6e789e6aa1b965f4ULL);
  CHECK(c == 0x06c45d188009454fULL);
}

TEST_CASE("identical seeds give identical streams") {
  Rng a(123456789), b(123456789);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("seed zero is well mixed") {
  Rng z(0);
  // SplitMix64 seeding guarantees a nonzero, non-degenerate state.
  std::uint64_t x = z.next_u64(), y = z.next_u64();
  CHECK(x != 0);
  CHECK(x != y);
}

TEST_CASE("derived streams are deterministic and distinct") {
  Rng a0 = Rng::derive(42, 0), a0b = Rng::derive(42, 0), a1 = Rng::derive(42, 1);
  CHECK(a0.next_u64() == a0b.next_u64());
  Rng c0 = Rng::derive(42, 0);
  CHECK(c0.next_u64() != a1.next_u64());
}

TEST_CASE("uniform stays in [0, 1) and respects bounds") {
  Rng rng(7);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.uniform(-3.0, 2.0);
    CHECK(v >= -3.0);
    CHECK(v < 2.0);
  }
}

TEST_CASE("golden first draws for seed 42") {
  // Frozen reference values; any change to the generator breaks every
  // reproducibility promise downstream.
  Rng g(42);
  CHECK(g.gaussian(0.0, 1.0) == doctest::Approx(-1.6132237513849157).epsilon(1e-15));
  Rng u(42);
  CHECK(u.uniform() == doctest::Approx(0.083862971059882163).epsilon(1e-15));
}

TEST_CASE("gaussian handles degenerate variance") {
  Rng rng(1);
  CHECK(rng.gaussian(3.5, 0.0) == 3.5);
  CHECK_THROWS_AS(rng.gaussian(0.0, -1.0), std::invalid_argument);
}

TEST_CASE("gaussian consumes two words regardless of variance") {
  Rng a(9), b(9);
  (void)a.gaussian(0.0, 0.0);
  (void)b.next_u64();
  (void)b.next_u64();
  CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("gaussian sample moments match over 1e6 draws") {
  Rng rng(2024);
  const int n = 1000000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.gaussian(0.0, 0.5);
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 0.005);
  CHECK(var > 0.495);
  CHECK(var < 0.505);
}

TEST_CASE("next_below stays under the bound and rejects zero") {
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) CHECK(rng.next_below(13) < 13);
  CHECK_THROWS_AS(rng.next_below(0), std::invalid_argument);
  // All residues of a small bound occur.
  std::vector<int> seen(4, 0);
  Rng r2(6);
  for (int i = 0; i < 1000; ++i) ++seen[r2.next_below(4)];
  for (int c : seen) CHECK(c > 0);
}
