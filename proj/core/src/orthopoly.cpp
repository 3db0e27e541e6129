#include "butterfly/orthopoly.hpp"

#include <bit>
#include <stdexcept>

namespace butterfly {

Poly poly_add(const Poly& a, const Poly& b) {
  Poly out(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
  return out;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

Poly poly_scale(const Poly& a, double s) {
  Poly out = a;
  for (double& c : out) c *= s;
  return out;
}

double poly_eval(const Poly& a, double x) {
  double v = 0.0;
  for (std::size_t i = a.size(); i-- > 0;) v = v * x + a[i];
  return v;
}

PolyMatrix PolyMatrix::identity(std::size_t n) {
  PolyMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = Poly{1.0};
  return m;
}

PolyMatrix pm_mul(const PolyMatrix& a, const PolyMatrix& b) {
  if (a.cols != b.rows) throw std::invalid_argument("pm_mul: shape mismatch");
  PolyMatrix out(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      const Poly& aik = a.at(i, k);
      if (aik.empty()) continue;
      for (std::size_t j = 0; j < b.cols; ++j) {
        const Poly& bkj = b.at(k, j);
        if (bkj.empty()) continue;
        out.at(i, j) = poly_add(out.at(i, j), poly_mul(aik, bkj));
      }
    }
  return out;
}

std::vector<Poly> pm_apply(const PolyMatrix& a, const std::vector<Poly>& x) {
  if (a.cols != x.size()) throw std::invalid_argument("pm_apply: shape mismatch");
  std::vector<Poly> out(a.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      const Poly& aik = a.at(i, k);
      if (aik.empty() || x[k].empty()) continue;
      out[i] = poly_add(out[i], poly_mul(aik, x[k]));
    }
  return out;
}

Recurrence legendre_recurrence(std::size_t j) {
  if (j == 0) return {1.0, 0.0, 0.0};
  const double dj = static_cast<double>(j);
  return {(2.0 * dj + 1.0) / (dj + 1.0), 0.0, -dj / (dj + 1.0)};
}

PolyMatrix transition_matrix(const Recurrence& r) {
  PolyMatrix t(2, 2);
  t.at(0, 0) = Poly{r.b, r.a};
  t.at(0, 1) = Poly{r.c};
  t.at(1, 0) = Poly{1.0};
  return t;
}

PolyMatrix transition_product(const RecurrenceProvider& provider, std::size_t lo,
                              std::size_t hi) {
  if (lo > hi) throw std::invalid_argument("transition_product: lo > hi");
  PolyMatrix acc = transition_matrix(provider(lo));
  for (std::size_t j = lo + 1; j <= hi; ++j)
    acc = pm_mul(transition_matrix(provider(j)), acc);
  return acc;
}

namespace {

// blockdiag placement of src at (row0, col0)
void place(PolyMatrix& dst, const PolyMatrix& src, std::size_t row0, std::size_t col0) {
  for (std::size_t i = 0; i < src.rows; ++i)
    for (std::size_t j = 0; j < src.cols; ++j)
      if (!src.at(i, j).empty()) dst.at(row0 + i, col0 + j) = src.at(i, j);
}

}  // namespace

std::vector<PolyMatrix> orthopoly_transition_factorization(
    std::size_t n, const RecurrenceProvider& provider) {
  if (n < 2 || !std::has_single_bit(n))
    throw std::invalid_argument("orthopoly factorization: n must be a power of two >= 2");
  for (std::size_t j = 0; j < n; ++j)
    if (provider(j).a == 0.0)
      throw std::invalid_argument("orthopoly factorization: a_j must be nonzero");
  if (provider(1).c == 0.0)
    throw std::invalid_argument("orthopoly factorization: c_1 must be nonzero");

  const std::size_t m = static_cast<std::size_t>(std::bit_width(n) - 1);
  std::vector<PolyMatrix> factors;
  factors.reserve(m + 1);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t blocks = std::size_t{1} << k;
    const std::size_t run = n >> (k + 1);  // transitions multiplied per block
    PolyMatrix f(4 * blocks, 2 * blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
      const std::size_t off = b * (n >> k);
      place(f, PolyMatrix::identity(2), 4 * b, 2 * b);
      place(f, transition_product(provider, off, off + run - 1), 4 * b + 2, 2 * b);
    }
    factors.push_back(std::move(f));
  }
  PolyMatrix last(2 * n, 2 * n);
  for (std::size_t j = 0; j < n; ++j)
    place(last, transition_matrix(provider(j)), 2 * j, 2 * j);
  factors.push_back(std::move(last));
  return factors;
}

std::vector<Poly> orthopoly_polynomials(std::size_t n,
                                        const RecurrenceProvider& provider) {
  const std::vector<PolyMatrix> factors = orthopoly_transition_factorization(n, provider);
  std::vector<Poly> col{Poly{1.0}, Poly{}};
  for (const PolyMatrix& f : factors) col = pm_apply(f, col);
  std::vector<Poly> out(n);
  for (std::size_t t = 0; t < n; ++t) out[t] = col[2 * t + 1];
  return out;
}

}  // namespace butterfly
