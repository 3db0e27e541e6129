#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <butterfly/dense.hpp>
#include <butterfly/rng.hpp>
#include <butterfly/transforms.hpp>

using namespace butterfly;

namespace {

constexpr double kPi = std::numbers::pi;

DenseMatrix gen(TransformKind k, std::size_t n, Scaling s, std::uint64_t seed = 0) {
  TransformSpec spec;
  spec.kind = k;
  spec.n = n;
  spec.scaling = s;
  spec.seed = seed;
  return generate(spec);
}

// Reference polynomial helpers for the Rodrigues oracle.
std::vector<double> rpoly_mul(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

std::vector<double> rpoly_diff(const std::vector<double>& a) {
  if (a.size() <= 1) return {};
  std::vector<double> out(a.size() - 1);
  for (std::size_t i = 1; i < a.size(); ++i) out[i - 1] = a[i] * double(i);
  return out;
}

// Rodrigues formula: L_k = (2^k k!)^{-1} d^k/dx^k (x^2 - 1)^k.
std::vector<double> rodrigues_legendre(unsigned k) {
  std::vector<double> p{1.0};
  const std::vector<double> base{-1.0, 0.0, 1.0};
  for (unsigned i = 0; i < k; ++i) p = rpoly_mul(p, base);
  for (unsigned i = 0; i < k; ++i) p = rpoly_diff(p);
  double scale = 1.0;
  for (unsigned i = 1; i <= k; ++i) scale *= 2.0 * double(i);
  for (double& c : p) c /= scale;
  if (p.empty()) p = {1.0};
  return p;
}

}  // namespace

TEST_CASE("normalized DFT at N = 2") {
  DenseMatrix f = gen(TransformKind::Dft, 2, Scaling::Normalized);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(f.at(0, 0) - Cx{s, 0}) < 1e-15);
  CHECK(std::abs(f.at(0, 1) - Cx{s, 0}) < 1e-15);
  CHECK(std::abs(f.at(1, 0) - Cx{s, 0}) < 1e-15);
  CHECK(std::abs(f.at(1, 1) - Cx{-s, 0}) < 1e-15);
}

TEST_CASE("raw DFT entries follow e^{-2 pi i n k / N}") {
  DenseMatrix f = gen(TransformKind::Dft, 4, Scaling::Raw);
  CHECK(std::abs(f.at(1, 1) - Cx{0, -1}) < 1e-15);
  CHECK(std::abs(f.at(2, 2) - Cx{1, 0}) < 1e-15);
  for (std::size_t k = 0; k < 4; ++k)
    for (std::size_t n = 0; n < 4; ++n) {
      const double th = -2.0 * kPi * double(n) * double(k) / 4.0;
      CHECK(std::abs(f.at(k, n) - Cx{std::cos(th), std::sin(th)}) < 1e-15);
      CHECK(std::abs(f.at(k, n) - f.at(n, k)) < 1e-15);
    }
  // Normalized is raw / sqrt(N).
  DenseMatrix fn = gen(TransformKind::Dft, 4, Scaling::Normalized);
  for (std::size_t i = 0; i < 16; ++i)
    CHECK(std::abs(fn.entries[i] - f.entries[i] / 2.0) < 1e-15);
}

TEST_CASE("Hadamard entries are signed powers of 1/sqrt(2)") {
  DenseMatrix h = gen(TransformKind::Hadamard, 4, Scaling::Raw);
  for (std::size_t k = 0; k < 4; ++k)
    for (std::size_t n = 0; n < 4; ++n) {
      const double sign = std::popcount(k & n) % 2 == 0 ? 1.0 : -1.0;
      CHECK(h.at(k, n) == Cx{sign * 0.5, 0.0});
    }
  // The recursion already normalizes; both scalings agree.
  DenseMatrix hn = gen(TransformKind::Hadamard, 4, Scaling::Normalized);
  CHECK(max_abs_diff(h, hn) == 0.0);
}

TEST_CASE("Hartley is cas(2 pi n k / N) and matches Re - Im of the DFT") {
  DenseMatrix h = gen(TransformKind::Hartley, 4, Scaling::Raw);
  CHECK(std::abs(h.at(1, 1) - Cx{1, 0}) < 1e-15);
  DenseMatrix f = gen(TransformKind::Dft, 16, Scaling::Raw);
  DenseMatrix h16 = gen(TransformKind::Hartley, 16, Scaling::Raw);
  for (std::size_t i = 0; i < h16.entries.size(); ++i) {
    CHECK(h16.entries[i].imag() == 0.0);
    CHECK(std::abs(h16.entries[i].real() -
                   (f.entries[i].real() - f.entries[i].imag())) < 1e-12);
  }
}

TEST_CASE("normalized DFT, Hadamard and Hartley are unitary") {
  for (std::size_t n = 2; n <= 256; n *= 2) {
    for (TransformKind kind :
         {TransformKind::Dft, TransformKind::Hadamard, TransformKind::Hartley}) {
      DenseMatrix t = gen(kind, n, Scaling::Normalized);
      DenseMatrix g = matmul(conj_transpose(t), t);
      CHECK(max_abs_diff(g, DenseMatrix::identity(n)) < 1e-10);
    }
  }
}

TEST_CASE("raw DCT and DST match their closed forms") {
  const std::size_t n = 8;
  DenseMatrix dct = gen(TransformKind::Dct, n, Scaling::Raw);
  DenseMatrix dst = gen(TransformKind::Dst, n, Scaling::Raw);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < n; ++j) {
      const double a = (kPi / double(n)) * (double(j) + 0.5);
      CHECK(dct.at(k, j).imag() == 0.0);
      CHECK(std::abs(dct.at(k, j).real() - std::cos(a * double(k))) < 1e-15);
      CHECK(std::abs(dst.at(k, j).real() - std::sin(a * double(k + 1))) < 1e-15);
    }
}

TEST_CASE("normalized DCT/DST gram matrices are identity up to one known entry") {
  // sqrt(2/N) scaling makes every row orthonormal except the constant DCT row
  // (norm^2 = 2) and the alternating last DST row (norm^2 = 2).
  for (std::size_t n : {4u, 8u, 32u}) {
    DenseMatrix dct = gen(TransformKind::Dct, n, Scaling::Normalized);
    DenseMatrix g = matmul(dct, conj_transpose(dct));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double expect = i != j ? 0.0 : (i == 0 ? 2.0 : 1.0);
        CHECK(std::abs(g.at(i, j) - Cx{expect, 0}) < 1e-10);
      }
    DenseMatrix dst = gen(TransformKind::Dst, n, Scaling::Normalized);
    DenseMatrix gs = matmul(dst, conj_transpose(dst));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double expect = i != j ? 0.0 : (i + 1 == n ? 2.0 : 1.0);
        CHECK(std::abs(gs.at(i, j) - Cx{expect, 0}) < 1e-10);
      }
  }
}

TEST_CASE("circulant indexing and matvec follow cyclic convolution") {
  Rng rng(11);
  const std::size_t n = 8;
  std::vector<Cx> h(n);
  for (Cx& e : h) e = Cx{rng.gaussian(0.0, 1.0), rng.gaussian(0.0, 1.0)};
  DenseMatrix c = circulant(h);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k)
      CHECK(c.at(j, k) == h[(j + n - k) % n]);
  // y_j = sum_k h_{(j-k) mod n} x_k.
  std::vector<Cx> x(n);
  for (Cx& e : x) e = Cx{rng.gaussian(0.0, 1.0), rng.gaussian(0.0, 1.0)};
  auto y = dense_matvec(c, x);
  for (std::size_t j = 0; j < n; ++j) {
    Cx acc{0, 0};
    for (std::size_t k = 0; k < n; ++k) acc += h[(j + n - k) % n] * x[k];
    CHECK(std::abs(y[j] - acc) < 1e-13);
  }
  // Delta filter gives the identity.
  std::vector<Cx> delta(n, Cx{0, 0});
  delta[0] = Cx{1, 0};
  CHECK(max_abs_diff(circulant(delta), DenseMatrix::identity(n)) == 0.0);
}

TEST_CASE("toeplitz places t_{j-k} with ascending symbol storage") {
  Rng rng(12);
  const std::size_t n = 4;
  std::vector<Cx> t(2 * n - 1);
  for (Cx& e : t) e = Cx{rng.gaussian(0.0, 1.0), rng.gaussian(0.0, 1.0)};
  DenseMatrix m = toeplitz(t);
  CHECK(m.rows == n);
  CHECK(m.cols == n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k)
      CHECK(m.at(j, k) == t[std::size_t(std::ptrdiff_t(j) - std::ptrdiff_t(k) +
                                        std::ptrdiff_t(n) - 1)]);
  // t_0 = 1, rest 0: identity.
  std::vector<Cx> delta(2 * n - 1, Cx{0, 0});
  delta[n - 1] = Cx{1, 0};
  CHECK(max_abs_diff(toeplitz(delta), DenseMatrix::identity(n)) == 0.0);
}

TEST_CASE("convolution filters are unit norm and deterministic") {
  auto h1 = convolution_filter(16, 5);
  auto h2 = convolution_filter(16, 5);
  auto h3 = convolution_filter(16, 6);
  CHECK(h1 == h2);
  CHECK(h1 != h3);
  double norm = 0.0;
  for (const Cx& e : h1) norm += std::norm(e);
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
  // The convolution target is the circulant of the same filter.
  DenseMatrix conv = gen(TransformKind::Convolution, 16, Scaling::Raw, 5);
  CHECK(max_abs_diff(conv, circulant(h1)) == 0.0);
  DenseMatrix convn = gen(TransformKind::Convolution, 16, Scaling::Normalized, 5);
  CHECK(max_abs_diff(conv, convn) == 0.0);
}

TEST_CASE("randn targets are real i.i.d. N(1, 1/N) and seeded") {
  const std::size_t n = 64;
  DenseMatrix a = gen(TransformKind::Randn, n, Scaling::Raw, 3);
  DenseMatrix b = gen(TransformKind::Randn, n, Scaling::Raw, 3);
  DenseMatrix c = gen(TransformKind::Randn, n, Scaling::Raw, 4);
  CHECK(max_abs_diff(a, b) == 0.0);
  CHECK(max_abs_diff(a, c) > 0.0);
  double mean = 0.0, var = 0.0;
  for (const Cx& e : a.entries) {
    CHECK(e.imag() == 0.0);
    mean += e.real();
  }
  mean /= double(a.entries.size());
  for (const Cx& e : a.entries) var += (e.real() - mean) * (e.real() - mean);
  var /= double(a.entries.size() - 1);
  CHECK(std::abs(mean - 1.0) < 0.01);
  CHECK(var == doctest::Approx(1.0 / double(n)).epsilon(0.15));
}

TEST_CASE("legendre coefficient pins and the Rodrigues oracle") {
  CHECK(legendre_poly_coeffs(0) == std::vector<double>{1.0});
  CHECK(legendre_poly_coeffs(1) == std::vector<double>{0.0, 1.0});
  auto l2 = legendre_poly_coeffs(2);
  REQUIRE(l2.size() == 3);
  CHECK(l2[0] == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(l2[1] == 0.0);
  CHECK(l2[2] == doctest::Approx(1.5).epsilon(1e-15));
  for (unsigned k = 0; k <= 10; ++k) {
    auto got = legendre_poly_coeffs(k);
    auto want = rodrigues_legendre(k);
    REQUIRE(got.size() == want.size());
    double scale = 0.0;
    for (double w : want) scale = std::max(scale, std::abs(w));
    for (std::size_t i = 0; i < got.size(); ++i)
      CHECK(std::abs(got[i] - want[i]) < 1e-12 * scale);
  }
}

TEST_CASE("legendre_value agrees with the expanded polynomial") {
  for (unsigned k = 0; k <= 12; ++k) {
    auto coeffs = legendre_poly_coeffs(k);
    for (double x : {-1.0, -0.7, 0.0, 0.3, 1.0}) {
      double horner = 0.0;
      for (std::size_t i = coeffs.size(); i-- > 0;) horner = horner * x + coeffs[i];
      CHECK(legendre_value(k, x) == doctest::Approx(horner).epsilon(1e-9));
    }
    CHECK(legendre_value(k, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("raw legendre target samples L_k on the uniform grid") {
  const std::size_t n = 8;
  DenseMatrix t = gen(TransformKind::Legendre, n, Scaling::Raw);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < n; ++j) {
      const double x = 2.0 * double(j) / double(n) - 1.0;
      CHECK(t.at(k, j).imag() == 0.0);
      CHECK(t.at(k, j).real() == doctest::Approx(legendre_value(unsigned(k), x))
                                     .epsilon(1e-13));
    }
  // Row 2 in closed form.
  for (std::size_t j = 0; j < n; ++j) {
    const double x = 2.0 * double(j) / double(n) - 1.0;
    CHECK(t.at(2, j).real() ==
          doctest::Approx((3.0 * x * x - 1.0) / 2.0).epsilon(1e-13));
  }
}

TEST_CASE("gauss_legendre_nodes match closed forms and integrate exactly") {
  std::vector<double> x, w;
  gauss_legendre_nodes(2, x, w);
  REQUIRE(x.size() == 2);
  CHECK(x[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(x[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(w[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(w[1] == doctest::Approx(1.0).epsilon(1e-14));

  for (std::size_t n : {1u, 3u, 5u, 8u}) {
    gauss_legendre_nodes(n, x, w);
    REQUIRE(x.size() == n);
    double wsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      wsum += w[i];
      CHECK(w[i] > 0.0);
      if (i > 0) CHECK(x[i] > x[i - 1]);
      CHECK(std::abs(x[i] + x[n - 1 - i]) < 1e-13);  // symmetric nodes
      CHECK(std::abs(legendre_value(unsigned(n), x[i])) < 1e-12);  // roots of L_n
    }
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-13));
    // Exact for monomials of degree <= 2n - 1.
    for (unsigned d = 0; d < 2 * n; ++d) {
      double quad = 0.0;
      for (std::size_t i = 0; i < n; ++i) quad += w[i] * std::pow(x[i], double(d));
      const double exact = d % 2 == 1 ? 0.0 : 2.0 / double(d + 1);
      CHECK(std::abs(quad - exact) < 1e-13);
    }
  }
}

TEST_CASE("normalized legendre transform is orthogonal") {
  for (std::size_t n = 2; n <= 64; n *= 2) {
    DenseMatrix t = gen(TransformKind::Legendre, n, Scaling::Normalized);
    DenseMatrix g = matmul(t, conj_transpose(t));
    CHECK(max_abs_diff(g, DenseMatrix::identity(n)) < 1e-10);
  }
}

TEST_CASE("transform names parse and round trip") {
  for (TransformKind kind : all_transforms()) {
    CHECK(parse_transform(transform_name(kind)) == kind);
  }
  CHECK(all_transforms().size() == 8);
  CHECK(parse_transform("dft") == TransformKind::Dft);
  CHECK(transform_name(TransformKind::Convolution) == "conv");
  CHECK_THROWS_AS((void)parse_transform("bogus"), std::invalid_argument);
}

TEST_CASE("generate rejects sizes that are not powers of two") {
  TransformSpec spec;
  spec.n = 12;
  CHECK_THROWS_AS((void)generate(spec), std::invalid_argument);
  spec.n = 0;
  CHECK_THROWS_AS((void)generate(spec), std::invalid_argument);
}
