#pragma once

#include <stdexcept>
#include <vector>

#include "butterfly/dense.hpp"

namespace butterfly {

struct SvdError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A ~= U diag(singular_values) V^H with U: m x k, V: n x k, k = requested rank.
// Columns of U and V are orthonormal; singular values are sorted descending.
struct TruncatedSvd {
  DenseMatrix u;
  std::vector<double> singular_values;
  DenseMatrix v;

  DenseMatrix reconstruct() const;
};

struct SvdOptions {
  int max_sweeps = 60;       // sweep cap; exceeding it throws SvdError
  double rel_tol = 1e-12;    // pair-orthogonality criterion relative to column norms
};

// One-sided Jacobi SVD (complex capable: a phase rotation reduces each column
// pair to the real case).  Deterministic: fixed cyclic pair order, no
// randomization.  rank must be <= min(rows, cols).
TruncatedSvd truncated_svd(const DenseMatrix& a, std::size_t rank,
                           const SvdOptions& options = {});

// All min(rows, cols) singular values, descending.
std::vector<double> singular_values(const DenseMatrix& a,
                                    const SvdOptions& options = {});

}  // namespace butterfly
