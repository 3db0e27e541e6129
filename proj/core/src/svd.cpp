#include "butterfly/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace butterfly {

DenseMatrix TruncatedSvd::reconstruct() const {
  DenseMatrix scaled = u;
  for (std::size_t i = 0; i < scaled.rows; ++i)
    for (std::size_t k = 0; k < scaled.cols; ++k)
      scaled.at(i, k) *= singular_values[k];
  return matmul(scaled, conj_transpose(v));
}

namespace {

// Full one-sided Jacobi on A with rows >= cols.  On return `w` holds A*V with
// orthogonal columns and `v` the accumulated rotations.
void one_sided_jacobi(DenseMatrix& w, DenseMatrix& v, const SvdOptions& options) {
  const std::size_t n = w.cols;
  if (n < 2) return;
  // Rotations preserve the Frobenius norm, so the scale is fixed at entry.
  // A column whose norm decays to rounding level relative to that scale holds
  // only rotation roundoff, which stays fully correlated with the live
  // columns; the relative pair test can never pass for it.  Such columns are
  // numerically zero and count as converged (full_svd rebuilds them by
  // orthonormal completion).
  double fro2 = 0.0;
  for (const Cx& e : w.entries) fro2 += std::norm(e);
  const double dead2 = fro2 * 1e-30;
  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double app = 0.0, aqq = 0.0;
        Cx apq{0.0, 0.0};
        for (std::size_t i = 0; i < w.rows; ++i) {
          const Cx wp = w.at(i, p), wq = w.at(i, q);
          app += std::norm(wp);
          aqq += std::norm(wq);
          apq += std::conj(wp) * wq;
        }
        const double off = std::abs(apq);
        if (app <= dead2 || aqq <= dead2) continue;
        if (off <= options.rel_tol * std::sqrt(app * aqq) || off == 0.0) continue;
        rotated = true;
        // Phase rotation makes the pair inner product real and positive, then
        // a real Jacobi rotation annihilates it.
        const Cx phase = apq / off;
        const double tau = (aqq - app) / (2.0 * off);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < w.rows; ++i) {
          const Cx wp = w.at(i, p);
          const Cx wq = w.at(i, q) * std::conj(phase);
          w.at(i, p) = c * wp - s * wq;
          w.at(i, q) = s * wp + c * wq;
        }
        for (std::size_t i = 0; i < v.rows; ++i) {
          const Cx vp = v.at(i, p);
          const Cx vq = v.at(i, q) * std::conj(phase);
          v.at(i, p) = c * vp - s * vq;
          v.at(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) return;
  }
  throw SvdError("one-sided Jacobi SVD did not converge within the sweep cap");
}

struct FullSvd {
  DenseMatrix u;
  std::vector<double> sigma;
  DenseMatrix v;
};

FullSvd full_svd(const DenseMatrix& a, const SvdOptions& options) {
  // Work on the tall orientation; swap factors back afterwards.
  const bool transposed = a.rows < a.cols;
  DenseMatrix w = transposed ? conj_transpose(a) : a;
  const std::size_t m = w.rows, n = w.cols;
  DenseMatrix v = DenseMatrix::identity(n, Field::Complex);
  one_sided_jacobi(w, v, options);

  std::vector<double> sigma(n);
  for (std::size_t k = 0; k < n; ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) sum += std::norm(w.at(i, k));
    sigma[k] = std::sqrt(sum);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return sigma[i] > sigma[j]; });

  DenseMatrix u(m, n, Field::Complex);
  DenseMatrix vs(n, n, Field::Complex);
  std::vector<double> s_sorted(n);
  const double sigma_max = sigma.empty() ? 0.0 : sigma[order[0]];
  const double zero_tol = sigma_max * 1e-14;
  std::vector<std::size_t> zero_cols;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    s_sorted[k] = sigma[src];
    for (std::size_t i = 0; i < n; ++i) vs.at(i, k) = v.at(i, src);
    if (sigma[src] > zero_tol && sigma[src] > 0.0) {
      const double inv = 1.0 / sigma[src];
      for (std::size_t i = 0; i < m; ++i) u.at(i, k) = w.at(i, src) * inv;
    } else {
      zero_cols.push_back(k);
    }
  }
  // Orthonormal completion for numerically-zero singular directions: project
  // canonical basis vectors against the accepted columns.
  for (std::size_t k : zero_cols) {
    for (std::size_t cand = 0; cand < m; ++cand) {
      std::vector<Cx> col(m, Cx{0.0, 0.0});
      col[cand] = Cx{1.0, 0.0};
      for (std::size_t j = 0; j < n; ++j) {
        if (std::find(zero_cols.begin(), zero_cols.end(), j) != zero_cols.end() &&
            j >= k)
          continue;
        Cx dot{0.0, 0.0};
        for (std::size_t i = 0; i < m; ++i) dot += std::conj(u.at(i, j)) * col[i];
        for (std::size_t i = 0; i < m; ++i) col[i] -= dot * u.at(i, j);
      }
      double nrm = 0.0;
      for (const Cx& e : col) nrm += std::norm(e);
      nrm = std::sqrt(nrm);
      if (nrm > 0.5) {
        for (std::size_t i = 0; i < m; ++i) u.at(i, k) = col[i] / nrm;
        break;
      }
    }
  }

  if (transposed) return FullSvd{std::move(vs), std::move(s_sorted), std::move(u)};
  return FullSvd{std::move(u), std::move(s_sorted), std::move(vs)};
}

}  // namespace

TruncatedSvd truncated_svd(const DenseMatrix& a, std::size_t rank,
                           const SvdOptions& options) {
  const std::size_t kmax = std::min(a.rows, a.cols);
  if (rank > kmax)
    throw std::invalid_argument("truncated_svd: rank exceeds min(rows, cols)");
  FullSvd f = full_svd(a, options);
  TruncatedSvd out;
  out.u = DenseMatrix(a.rows, rank, Field::Complex);
  out.v = DenseMatrix(a.cols, rank, Field::Complex);
  out.singular_values.assign(f.sigma.begin(), f.sigma.begin() + rank);
  for (std::size_t k = 0; k < rank; ++k) {
    for (std::size_t i = 0; i < a.rows; ++i) out.u.at(i, k) = f.u.at(i, k);
    for (std::size_t i = 0; i < a.cols; ++i) out.v.at(i, k) = f.v.at(i, k);
  }
  return out;
}

std::vector<double> singular_values(const DenseMatrix& a, const SvdOptions& options) {
  return full_svd(a, options).sigma;
}

}  // namespace butterfly
