#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "butterfly/butterfly_stack.hpp"
#include "butterfly/dense.hpp"
#include "butterfly/permutation.hpp"

namespace butterfly {

// Hand-built module: dense form = expand_dense(butterfly) * P.
struct BPModuleExact {
  ButterflyStack butterfly;
  HardPermutation permutation;

  std::size_t size() const { return butterfly.size(); }
  // out = B (P in); out may not alias in
  void apply(std::span<const Cx> in, std::span<Cx> out) const;
  DenseMatrix expand() const;
};

// Product of exact modules over size r*n with the upper-left n x n selector.
// modules[0] is the leftmost factor (applied last).
struct BPProductExact {
  std::size_t n = 0;
  std::size_t r = 1;
  bool post_real_part = false;
  std::vector<BPModuleExact> modules;

  std::size_t inner_size() const { return n * r; }
  std::vector<Cx> apply(std::span<const Cx> x) const;
  // n x n matrix S (prod B_i P_i) S^T, with Re applied when flagged
  DenseMatrix represented() const;

  static BPProductExact wrap(std::size_t n, BPModuleExact module);
};

// Decimation-in-time FFT as one butterfly stack over the bit-reversal
// permutation; expand() equals the raw DFT matrix.
BPModuleExact fft_bp(std::size_t n);
// Inverse with conjugate twiddles; the 1/n constant is folded into the
// outermost level.
BPModuleExact ifft_bp(std::size_t n);
// Normalized Hadamard: every level entry +/- 1/sqrt(2), identity permutation.
BPModuleExact hadamard_bp(std::size_t n);

// Even/odd split with the second half reversed: [x0..x_{n-1}] ->
// [x0, x2, ..., x_{n-1}, ..., x3, x1] (gather map 2i / 2(n-1-i)+1).
HardPermutation dct_input_permutation(std::size_t n);

// Cosine transform of the raw formula matrix cos((pi/n)(j+1/2) k) as two
// modules: a scaled FFT on the left, the split permutation (with identity
// butterfly) on the right, and a final real-part step.
BPProductExact dct_bp2(std::size_t n);
// Sine transform sin((pi/n)(j+1/2)(k+1)); the right butterfly realizes the
// diagonal modulation diag(e^{-2 pi i p/n}) * diag(I, -I).
BPProductExact dst_bp2(std::size_t n);

// circ(h) = iFFT . diag(FFT h) . FFT with constants folded.
BPProductExact circulant_bp2(std::span<const Cx> h);
// Toeplitz via the 2n circulant embedding, r = 2.  t has odd length 2n-1
// ordered t_{-(n-1)}..t_0..t_{n-1} as in toeplitz().
BPProductExact toeplitz_bp2r2(std::span<const Cx> t);

struct VerifyOptions {
  std::size_t max_n = 256;          // power-of-2 sweep bound (transform-specific caps apply)
  std::uint64_t seed = 7;           // filters and Toeplitz symbols
  bool inject_twiddle_error = false;  // perturb one FFT twiddle: negative control
};

struct VerifyRow {
  std::string transform;
  std::size_t n = 0;
  double max_abs_error = 0.0;  // relative coefficient error for legendre
  double threshold = 0.0;
  bool passed = false;
};

struct VerifyReport {
  std::vector<VerifyRow> rows;
  bool all_passed() const;
};

// Sweeps every exact constructor against its brute-force dense oracle:
// dft/idft/hadamard/circulant/dct/dst at n = 2..max_n, toeplitz to
// min(max_n, 512), legendre coefficients to min(max_n, 64).
VerifyReport verify_exact(const VerifyOptions& options = {});

}  // namespace butterfly
