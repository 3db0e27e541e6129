#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "butterfly/dense.hpp"

namespace butterfly {

enum class TransformKind { Dft, Dct, Dst, Convolution, Hadamard, Hartley, Legendre, Randn };

enum class Scaling { Raw, Normalized };

// Dense target description.  Convolution and Randn are fully determined by
// (seed, n); the other kinds ignore the seed.
struct TransformSpec {
  TransformKind kind = TransformKind::Dft;
  std::size_t n = 8;
  Scaling scaling = Scaling::Normalized;
  std::uint64_t seed = 0;
};

// Entry conventions (row k, column n), raw scaling:
//   DFT       e^{-2 pi i n k / N}
//   DCT       cos[(pi/N)(n + 1/2) k]
//   DST       sin[(pi/N)(n + 1/2)(k + 1)]
//   Conv      circulant(h) with unit-norm complex Gaussian h from the seed
//   Hadamard  2^{-m/2} (-1)^{popcount(k & n)}   (the 1/sqrt2 recursion)
//   Hartley   cos(2 pi n k / N) + sin(2 pi n k / N)
//   Legendre  L_k(2n/N - 1) via the three-term recurrence
//   Randn     i.i.d. N(1, 1/N) from the seed
// Normalized scaling multiplies DFT and Hartley by 1/sqrt(N), DCT and DST by
// sqrt(2/N); Hadamard, Convolution and Randn are unchanged.  Normalized
// Legendre switches to the orthonormal discrete Legendre transform
// sqrt(w_j (2k+1)/2) L_k(x_j) on the N Gauss-Legendre nodes x_j.
DenseMatrix generate(const TransformSpec& spec);

// A_{jk} = h_{(j-k) mod N}.
DenseMatrix circulant(std::span<const Cx> h);

// t holds the 2N-1 diagonal values t_{-N+1} .. t_{N-1} in ascending index
// order; (T)_{jk} = t_{j-k}.
DenseMatrix toeplitz(std::span<const Cx> t);

// Unit-norm complex Gaussian filter used by Convolution targets; the same
// filter feeds the exact circulant factorization so both sides agree.
std::vector<Cx> convolution_filter(std::size_t n, std::uint64_t seed);

// Coefficients of the Legendre polynomial L_k, ascending degree, via the
// recurrence k L_k = (2k-1) x L_{k-1} - (k-1) L_{k-2}.
std::vector<double> legendre_poly_coeffs(unsigned k);

// Pointwise evaluation by the same recurrence (numerically stable form used
// by the generator).
double legendre_value(unsigned k, double x);

// Gauss-Legendre quadrature: the n roots of L_n (ascending) and their
// weights.  Exact for polynomials of degree <= 2n-1, so the normalized
// Legendre target built on these nodes is exactly orthogonal.
void gauss_legendre_nodes(std::size_t n, std::vector<double>& nodes,
                          std::vector<double>& weights);

TransformKind parse_transform(std::string_view name);
std::string transform_name(TransformKind kind);

// All kinds in a fixed presentation order (CLI "all", reports).
std::span<const TransformKind> all_transforms();

}  // namespace butterfly
