#include "butterfly/baselines.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "butterfly/svd.hpp"
#include "butterfly/train.hpp"

namespace butterfly {

std::size_t budget_for(const ArchSpec& arch, std::size_t n) {
  const std::size_t rn = arch.r * n;
  if (rn < 2 || !std::has_single_bit(rn))
    throw std::invalid_argument("budget_for: rN must be a power of two >= 2");
  const std::size_t m = static_cast<std::size_t>(std::bit_width(rn)) - 1;
  const std::size_t logits = 3 * (m - 1);
  std::size_t budget = arch.k * (4 * rn - 4 + logits);
  if (arch.extra_input_perm) budget += logits;
  return budget;
}

DenseMatrix sparse_approx(const DenseMatrix& t, std::size_t s) {
  const std::size_t total = t.entries.size();
  s = std::min(s, total);
  std::vector<std::size_t> idx(total);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(t.entries[a]) > std::abs(t.entries[b]);
  });
  DenseMatrix out(t.rows, t.cols, t.field);
  for (std::size_t k = 0; k < s; ++k) out.entries[idx[k]] = t.entries[idx[k]];
  return out;
}

DenseMatrix lowrank_approx_rank(const DenseMatrix& t, std::size_t rank) {
  return truncated_svd(t, rank).reconstruct();
}

DenseMatrix lowrank_approx(const DenseMatrix& t, std::size_t budget) {
  const std::size_t r = budget / (2 * t.rows);
  if (r == 0)
    throw std::invalid_argument("lowrank_approx: budget below one rank-1 pair");
  return lowrank_approx_rank(t, std::min(r, std::min(t.rows, t.cols)));
}

SparseLowrankResult sparse_plus_lowrank(const DenseMatrix& t, std::size_t budget,
                                        double split) {
  if (split < 0.0 || split > 1.0)
    throw std::invalid_argument("sparse_plus_lowrank: split outside [0,1]");
  const std::size_t s =
      std::min<std::size_t>(budget, static_cast<std::size_t>(
                                        std::llround(split * static_cast<double>(budget))));
  const std::size_t rank = std::min((budget - s) / (2 * t.rows), std::min(t.rows, t.cols));

  SparseLowrankResult res;
  res.split = split;
  DenseMatrix sparse(t.rows, t.cols, t.field);
  DenseMatrix low(t.rows, t.cols, t.field);
  DenseMatrix best_sparse = sparse, best_low = low;
  double best_err = frobenius_norm(t);
  double prev_err = best_err;

  for (std::size_t it = 0; it < 200; ++it) {
    sparse = sparse_approx(subtract(t, low), s);
    if (rank > 0)
      low = lowrank_approx_rank(subtract(t, sparse), rank);
    DenseMatrix residual = subtract(t, sparse);
    for (std::size_t i = 0; i < residual.entries.size(); ++i)
      residual.entries[i] -= low.entries[i];
    const double err = frobenius_norm(residual);
    res.iterations = it + 1;
    if (err < best_err) {
      best_err = err;
      best_sparse = sparse;
      best_low = low;
    }
    if (prev_err - err < 1e-10) {
      res.oscillated = err > prev_err;
      break;
    }
    prev_err = err;
  }

  res.sparse = std::move(best_sparse);
  res.lowrank = std::move(best_low);
  const double denom = static_cast<double>(t.rows) * static_cast<double>(t.cols);
  res.rmse = best_err / std::sqrt(denom);
  return res;
}

SparseLowrankResult best_sparse_plus_lowrank(const DenseMatrix& t, std::size_t budget) {
  static constexpr double kGrid[] = {1.0, 0.75, 0.5, 0.25, 0.0};
  SparseLowrankResult best;
  bool have = false;
  for (double split : kGrid) {
    SparseLowrankResult cur = sparse_plus_lowrank(t, budget, split);
    if (!have || cur.rmse < best.rmse) {
      best = std::move(cur);
      have = true;
    }
  }
  return best;
}

std::vector<BaselineRow> baseline_table(std::span<const TransformSpec> specs) {
  using clock = std::chrono::steady_clock;
  std::vector<BaselineRow> rows;
  for (const TransformSpec& spec : specs) {
    const DenseMatrix t = generate(spec);
    const std::size_t budget = budget_for(arch_for(spec.kind), spec.n);
    const std::string name = transform_name(spec.kind);

    auto timed = [&](const std::string& method, auto&& fn) {
      const auto t0 = clock::now();
      const double rmse = fn();
      const double ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
      rows.push_back({name, spec.n, method, budget, rmse, ms});
    };

    timed("sparse", [&] { return frobenius_rmse(t, sparse_approx(t, budget)); });
    timed("lowrank", [&] { return frobenius_rmse(t, lowrank_approx(t, budget)); });
    timed("sparse_lowrank",
          [&] { return best_sparse_plus_lowrank(t, budget).rmse; });
  }
  return rows;
}

}  // namespace butterfly
