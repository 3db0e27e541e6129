#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace butterfly {

// Polynomial over the reals, coefficients ascending: p[0] + p[1] x + ...
// The empty vector is the zero polynomial.
using Poly = std::vector<double>;

Poly poly_add(const Poly& a, const Poly& b);
Poly poly_mul(const Poly& a, const Poly& b);
Poly poly_scale(const Poly& a, double s);
double poly_eval(const Poly& a, double x);

// Dense matrix of polynomials, row-major.  Most factorization entries are
// zero; the zero polynomial is stored as an empty coefficient vector.
struct PolyMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<Poly> entries;

  PolyMatrix() = default;
  PolyMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), entries(r * c) {}

  Poly& at(std::size_t i, std::size_t j) { return entries[i * cols + j]; }
  const Poly& at(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }

  static PolyMatrix identity(std::size_t n);
};

PolyMatrix pm_mul(const PolyMatrix& a, const PolyMatrix& b);
std::vector<Poly> pm_apply(const PolyMatrix& a, const std::vector<Poly>& x);

// Three-term recurrence step p_{j+1} = (a x + b) p_j + c p_{j-1}.
struct Recurrence {
  double a = 0.0, b = 0.0, c = 0.0;
};

// provider(j) gives the coefficients advancing degree j to j+1.  The boundary
// uses p_0 = 1, p_{-1} = 0, so provider(0) encodes p_1 = (a_0 x + b_0).
using RecurrenceProvider = std::function<Recurrence(std::size_t)>;

// Legendre: p_{j+1} = ((2j+1)/(j+1)) x p_j - (j/(j+1)) p_{j-1}; provider(0)
// yields p_1 = x.
Recurrence legendre_recurrence(std::size_t j);

// 2x2 transition [[a x + b, c], [1, 0]], mapping [p_j; p_{j-1}] to
// [p_{j+1}; p_j].
PolyMatrix transition_matrix(const Recurrence& r);

// Inclusive product T_hi ... T_lo (T_lo applied first); requires lo <= hi.
PolyMatrix transition_product(const RecurrenceProvider& provider, std::size_t lo,
                              std::size_t hi);

// Butterfly-shaped factorization of the transition hierarchy for n a power of
// two.  Returns log2(n)+1 sparse factors, input side first; factor k holds
// 2^k transition blocks.  For k < log2(n) each block is [I_2; T_{[hi:lo]}]
// over a run of n / 2^{k+1} transitions; the last factor is
// blockdiag(T_0, ..., T_{n-1}).  Applying the chain to the column [1; 0]
// yields stacked pairs [p_{t+1}; p_t], so the odd rows 2t+1 read off
// p_0, ..., p_{n-1}.
//
// Throws std::invalid_argument when any a_j (j < n) is zero or, for n >= 2,
// when c_1 is zero.
std::vector<PolyMatrix> orthopoly_transition_factorization(
    std::size_t n, const RecurrenceProvider& provider);

// p_0, ..., p_{n-1} computed through the factorization above (odd rows of the
// multiplied-out chain), not through the direct recurrence.
std::vector<Poly> orthopoly_polynomials(std::size_t n,
                                        const RecurrenceProvider& provider);

}  // namespace butterfly
