#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <butterfly/dense.hpp>
#include <butterfly/rng.hpp>
#include <butterfly/svd.hpp>
#include <butterfly/transforms.hpp>

using namespace butterfly;

namespace {

DenseMatrix random_real(std::size_t r, std::size_t c, Rng& rng) {
  DenseMatrix m(r, c, Field::Real);
  for (Cx& e : m.entries) e = Cx{rng.gaussian(0.0, 1.0), 0.0};
  return m;
}

DenseMatrix random_complex(std::size_t r, std::size_t c, Rng& rng) {
  DenseMatrix m(r, c, Field::Complex);
  for (Cx& e : m.entries) e = Cx{rng.gaussian(0.0, 0.5), rng.gaussian(0.0, 0.5)};
  return m;
}

// Independent oracle: cyclic two-sided Jacobi eigensolver on the Hermitian
// matrix A^H A; returns eigenvalues descending.
std::vector<double> gram_eigenvalues(const DenseMatrix& a) {
  DenseMatrix h = matmul(conj_transpose(a), a);
  const std::size_t n = h.rows;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(h.at(p, q));
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const Cx hpq = h.at(p, q);
        if (std::abs(hpq) == 0.0) continue;
        const double app = h.at(p, p).real(), aqq = h.at(q, q).real();
        const Cx phase = hpq / std::abs(hpq);
        const double tau = (aqq - app) / (2.0 * std::abs(hpq));
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        // Columns then rows: H <- J^H H J with J rotating (p, q).
        for (std::size_t i = 0; i < n; ++i) {
          const Cx hip = h.at(i, p);
          const Cx hiq = h.at(i, q) * std::conj(phase);
          h.at(i, p) = c * hip - s * hiq;
          h.at(i, q) = s * hip + c * hiq;
        }
        for (std::size_t j = 0; j < n; ++j) {
          const Cx hpj = h.at(p, j);
          const Cx hqj = std::conj(std::conj(phase)) * h.at(q, j);
          h.at(p, j) = c * hpj - s * hqj;
          h.at(q, j) = s * hpj + c * hqj;
        }
      }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = h.at(i, i).real();
  std::sort(ev.rbegin(), ev.rend());
  return ev;
}

double ortho_residual(const DenseMatrix& u) {
  return max_abs_diff(matmul(conj_transpose(u), u), DenseMatrix::identity(u.cols));
}

}  // namespace

TEST_CASE("diagonal matrix truncation") {
  DenseMatrix a(3, 3);
  a.at(0, 0) = Cx{3, 0};
  a.at(1, 1) = Cx{2, 0};
  a.at(2, 2) = Cx{1, 0};
  TruncatedSvd f = truncated_svd(a, 2);
  REQUIRE(f.singular_values.size() == 2);
  CHECK(f.singular_values[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(f.singular_values[1] == doctest::Approx(2.0).epsilon(1e-12));
  DenseMatrix resid = subtract(a, f.reconstruct());
  double fro2 = frobenius_norm(resid);
  CHECK(fro2 * fro2 == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("rank-1 outer product is reproduced exactly at r = 1") {
  Rng rng(3);
  const std::size_t n = 6;
  DenseMatrix a(n, n);
  std::vector<Cx> u(n), v(n);
  for (Cx& e : u) e = Cx{rng.gaussian(0.0, 1.0), rng.gaussian(0.0, 1.0)};
  for (Cx& e : v) e = Cx{rng.gaussian(0.0, 1.0), rng.gaussian(0.0, 1.0)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a.at(i, j) = u[i] * std::conj(v[j]);
  TruncatedSvd f = truncated_svd(a, 1);
  CHECK(max_abs_diff(a, f.reconstruct()) < 1e-12);
}

TEST_CASE("orthonormal factors, sorted spectrum, full-rank reconstruction") {
  Rng rng(17);
  for (int rep = 0; rep < 5; ++rep) {
    DenseMatrix a = random_complex(12, 12, rng);
    TruncatedSvd f = truncated_svd(a, 12);
    CHECK(ortho_residual(f.u) < 1e-10);
    CHECK(ortho_residual(f.v) < 1e-10);
    for (std::size_t k = 1; k < 12; ++k)
      CHECK(f.singular_values[k - 1] >= f.singular_values[k]);
    CHECK(max_abs_diff(a, f.reconstruct()) < 1e-10);
  }
}

TEST_CASE("Eckart-Young residual equals the spectral tail (Jacobi oracle)") {
  Rng rng(29);
  for (int rep = 0; rep < 5; ++rep) {
    DenseMatrix a = random_real(32, 32, rng);
    std::vector<double> ev = gram_eigenvalues(a);
    for (std::size_t r : {1u, 4u, 9u}) {
      TruncatedSvd f = truncated_svd(a, r);
      DenseMatrix resid = subtract(a, f.reconstruct());
      const double fro = frobenius_norm(resid);
      double tail = 0.0;
      for (std::size_t i = r; i < ev.size(); ++i) tail += ev[i];
      CHECK(fro * fro == doctest::Approx(tail).epsilon(1e-8));
      // Singular values match the oracle eigenvalues too.
      for (std::size_t i = 0; i < r; ++i)
        CHECK(f.singular_values[i] * f.singular_values[i] ==
              doctest::Approx(ev[i]).epsilon(1e-8));
    }
  }
}

TEST_CASE("rectangular and adjoint consistency") {
  Rng rng(41);
  DenseMatrix a = random_complex(16, 8, rng);
  TruncatedSvd f = truncated_svd(a, 8);
  CHECK(ortho_residual(f.u) < 1e-10);
  CHECK(ortho_residual(f.v) < 1e-10);
  CHECK(max_abs_diff(a, f.reconstruct()) < 1e-10);
  // sigma(A^H) = sigma(A)
  std::vector<double> sa = singular_values(a);
  std::vector<double> sah = singular_values(conj_transpose(a));
  REQUIRE(sa.size() == sah.size());
  for (std::size_t i = 0; i < sa.size(); ++i)
    CHECK(sa[i] == doctest::Approx(sah[i]).epsilon(1e-10));
}

TEST_CASE("rank out of range throws") {
  DenseMatrix a(4, 4);
  CHECK_THROWS_AS(truncated_svd(a, 5), std::invalid_argument);
}

TEST_CASE("rank-deficient input converges (zeroed-rows regression)") {
  // Normalized DFT with its 17 largest-magnitude entries removed row-major:
  // every entry ties in magnitude, so whole leading rows vanish and the
  // residual is exactly rank-deficient.  The dying column's content is pure
  // rotation roundoff; the sweep must still terminate.
  DenseMatrix t = generate({TransformKind::Dft, 8, Scaling::Normalized, 0});
  DenseMatrix r = t;
  for (std::size_t k = 0; k < 17; ++k) r.entries[k] = Cx{0, 0};
  TruncatedSvd f1 = truncated_svd(r, 1);
  CHECK(f1.singular_values[0] > 0.0);
  std::vector<double> sv = singular_values(r);
  // Rank 7: exactly one numerically-zero singular value.
  CHECK(sv.back() < 1e-12);
  CHECK(sv[sv.size() - 2] > 1e-6);
  // Eckart-Young still holds against the oracle.
  std::vector<double> ev = gram_eigenvalues(r);
  DenseMatrix resid = subtract(r, truncated_svd(r, 2).reconstruct());
  double tail = 0.0;
  for (std::size_t i = 2; i < ev.size(); ++i) tail += ev[i];
  const double fro = frobenius_norm(resid);
  CHECK(fro * fro == doctest::Approx(tail).epsilon(1e-8));
}

TEST_CASE("exactly-zero columns get an orthonormal completion") {
  Rng rng(53);
  DenseMatrix a = random_real(6, 6, rng);
  for (std::size_t i = 0; i < 6; ++i) {
    a.at(i, 2) = Cx{0, 0};
    a.at(i, 5) = Cx{0, 0};
  }
  TruncatedSvd f = truncated_svd(a, 6);
  CHECK(ortho_residual(f.u) < 1e-10);
  CHECK(f.singular_values[4] < 1e-13);
  CHECK(f.singular_values[5] < 1e-13);
  CHECK(max_abs_diff(a, f.reconstruct()) < 1e-10);
}

TEST_CASE("unitary input needs no rotations") {
  DenseMatrix f = generate({TransformKind::Dft, 16, Scaling::Normalized, 0});
  std::vector<double> sv = singular_values(f);
  for (double s : sv) CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
}
