#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "butterfly/dense.hpp"
#include "butterfly/model.hpp"
#include "butterfly/transforms.hpp"

namespace butterfly {

// Trainable-parameter count of the butterfly model for this architecture:
// k * (4rN - 4) butterfly entries (counted once regardless of field) plus
// 3 * (log2(rN) - 1) untied logits per permutation stack.  Matches
// BPProductModel::param_budget() for an untied model.
std::size_t budget_for(const ArchSpec& arch, std::size_t n);

// Keeps the s largest-magnitude entries, zeroes the rest; ties broken toward
// the earlier row-major index.
DenseMatrix sparse_approx(const DenseMatrix& t, std::size_t s);

// Best rank-r approximation with r = floor(budget / 2N); throws when that is
// zero.
DenseMatrix lowrank_approx(const DenseMatrix& t, std::size_t budget);
DenseMatrix lowrank_approx_rank(const DenseMatrix& t, std::size_t rank);

struct SparseLowrankResult {
  DenseMatrix sparse;
  DenseMatrix lowrank;
  double rmse = 0.0;      // frobenius_rmse(t, sparse + lowrank)
  double split = 1.0;     // fraction of the budget spent on sparse entries
  std::size_t iterations = 0;
  bool oscillated = false;  // alternation stopped improving; best iterate kept
};

// Alternating projection: S <- sparse(T - L), L <- lowrank(T - S) until the
// residual improves by less than 1e-10 or 200 iterations.  split * budget
// entries go to S, the rest to L's rank.
SparseLowrankResult sparse_plus_lowrank(const DenseMatrix& t, std::size_t budget,
                                        double split);
// Best split over the grid {1, 3/4, 1/2, 1/4, 0}; the endpoints reproduce the
// pure baselines exactly, so the result never loses to either.
SparseLowrankResult best_sparse_plus_lowrank(const DenseMatrix& t, std::size_t budget);

struct BaselineRow {
  std::string transform;
  std::size_t n = 0;
  std::string method;  // sparse | lowrank | sparse_lowrank
  std::size_t budget = 0;
  double rmse = 0.0;
  double wall_ms = 0.0;
};

// All three baselines at the butterfly-matched budget for each spec.
std::vector<BaselineRow> baseline_table(std::span<const TransformSpec> specs);

}  // namespace butterfly
