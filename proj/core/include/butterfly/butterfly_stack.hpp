#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "butterfly/dense.hpp"
#include "butterfly/rng.hpp"

namespace butterfly {

// One level of a butterfly stack.  A level of block size 2h pairs entries
// (t, h + t) within each block and applies [[d1[t], d2[t]], [d3[t], d4[t]]].
// The diagonals have length h and are shared (tied) across all n / 2h blocks.
struct ButterflyLevel {
  std::vector<Cx> d1, d2, d3, d4;
  std::size_t half() const { return d1.size(); }
};

// Product of log2(n) tied butterfly levels.  levels()[0] has block size 2 and
// is applied first; the last level couples the two halves of the vector.
// Total parameter count: sum over levels of 4 * 2^(level) / 2 = 4n - 4
// (complex entries counted once).  Application costs O(n log n).
class ButterflyStack {
 public:
  ButterflyStack() = default;

  static ButterflyStack identity(std::size_t n, Field field);
  // Diagonal entries drawn per real component from N(0, 1/2) in the real
  // field; in the complex field re and im each from N(0, 1/4).  Draw order:
  // levels ascending, d1..d4, entries ascending (re then im when complex).
  static ButterflyStack random(std::size_t n, Field field, Rng& rng);
  static ButterflyStack from_levels(std::size_t n, Field field,
                                    std::vector<ButterflyLevel> levels);

  std::size_t size() const { return n_; }
  Field field() const { return field_; }
  std::size_t num_levels() const { return levels_.size(); }
  std::size_t param_count() const { return n_ == 0 ? 0 : 4 * n_ - 4; }

  const ButterflyLevel& level(std::size_t i) const { return levels_[i]; }
  ButterflyLevel& level(std::size_t i) { return levels_[i]; }

  // y = B x in O(n log n); out may alias in.
  void fast_multiply(std::span<const Cx> in, std::span<Cx> out) const;
  std::vector<Cx> fast_multiply(std::span<const Cx> in) const;

  // Applies one level in place over a length-n_ buffer.
  void apply_level(std::size_t i, std::span<Cx> x) const;

  DenseMatrix expand_dense() const;

 private:
  std::size_t n_ = 0;
  Field field_ = Field::Complex;
  std::vector<ButterflyLevel> levels_;
};

}  // namespace butterfly
