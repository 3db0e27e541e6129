#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "butterfly/dense.hpp"

namespace butterfly {

// Gather convention everywhere: applying a permutation maps y[i] = x[map[i]],
// i.e. the matrix form has row i equal to e_{map[i]}^T.
struct HardPermutation {
  std::vector<std::uint32_t> map;

  static HardPermutation identity(std::size_t n);

  std::size_t size() const { return map.size(); }
  void apply(std::span<const Cx> in, std::span<Cx> out) const;
  std::vector<Cx> apply(std::span<const Cx> in) const;
  HardPermutation inverse() const;
  DenseMatrix to_matrix() const;
  bool is_valid() const;
};

// compose(outer, inner) with `inner` applied first:
// result.map[i] = inner.map[outer.map[i]].
HardPermutation compose(const HardPermutation& outer, const HardPermutation& inner);

// pi(i) = bit-reversal of i over log2(n) bits; n must be a power of two.
HardPermutation bit_reversal(std::size_t n);

// The three learnable chunk permutations.  Within one chunk of even size c:
//   EvenOdd          [x0 x1 x2 x3] -> [x0 x2 x1 x3]   (evens then odds)
//   ReverseFirstHalf [x0 x1 x2 x3] -> [x1 x0 x2 x3]
//   ReverseSecondHalf[x0 x1 x2 x3] -> [x0 x1 x3 x2]
enum class ElementaryPerm { EvenOdd, ReverseFirstHalf, ReverseSecondHalf };

// Index map of the elementary permutation applied chunk-wise over a length-n
// vector with the given chunk size (chunk divides n, both powers of two).
HardPermutation elementary_perm(ElementaryPerm kind, std::size_t n, std::size_t chunk);

struct PermChoice {
  bool even_odd = false;
  bool reverse_first = false;
  bool reverse_second = false;
};

struct LevelLogits {
  double a = 0.0;  // EvenOdd
  double b = 0.0;  // ReverseFirstHalf
  double c = 0.0;  // ReverseSecondHalf
};

struct LevelProbs {
  double a = 0.0, b = 0.0, c = 0.0;
};

// Numerically-saturating sigmoid: maps +/-1000 to exactly 1.0 / 0.0 so that
// hardened stacks reproduce hard permutations without floating residue.
double sigmoid(double logit);

// Learnable relaxed permutation over a power-of-two length n, structured as
// log2(n) levels.  Level k (0-based) mixes the three elementary permutations
// at chunk size n >> k; level 0 (chunk n) is applied first.  Within a level
// the EvenOdd mixture is applied first, then ReverseFirstHalf, then
// ReverseSecondHalf.  With every EvenOdd probability at 1 and the others at 0
// the stack is exactly the bit-reversal permutation.
//
// tied = true shares one logit triple across all levels (3 parameters instead
// of 3 log2 n); gradients for a tied triple accumulate over levels.
class RelaxedPermutationStack {
 public:
  RelaxedPermutationStack() = default;
  RelaxedPermutationStack(std::size_t n, bool tied);

  static RelaxedPermutationStack from_logits(std::size_t n, bool tied,
                                             std::vector<LevelLogits> logits);
  // Saturated logits (+/-1000): relaxed application is exactly hard.
  static RelaxedPermutationStack from_hard_choices(std::size_t n,
                                                   std::span<const PermChoice> choices);

  std::size_t size() const { return n_; }
  std::size_t num_levels() const { return num_levels_; }
  std::size_t chunk_size(std::size_t level) const { return n_ >> level; }
  bool tied() const { return tied_; }
  // 3 per stored triple: tied stacks expose 3 logits, untied 3*log2(n).
  std::size_t num_logits() const { return 3 * logits_.size(); }

  const LevelLogits& logits(std::size_t level) const {
    return logits_[tied_ ? 0 : level];
  }
  LevelLogits& logits(std::size_t level) { return logits_[tied_ ? 0 : level]; }
  LevelProbs probabilities(std::size_t level) const;

  void apply(std::span<const Cx> in, std::span<Cx> out) const;
  DenseMatrix expand_dense() const;

  struct Hardened {
    HardPermutation permutation;            // composed over all levels
    std::vector<PermChoice> choices;        // per level
    double max_rounding_distance = 0.0;     // max |p - round(p)| over mixtures
  };
  Hardened harden() const;

  // Sum over distinct logit triples of the binary entropy (natural log) of
  // each mixture probability; tied triples are counted once.
  double entropy() const;

  // Flat parameter order: per stored triple, logits a, b, c.
  void get_logits(std::vector<double>& out) const;
  void set_logits(std::span<const double> in);

 private:
  std::size_t n_ = 0;
  std::size_t num_levels_ = 0;
  bool tied_ = false;
  std::vector<LevelLogits> logits_;  // size 1 if tied, else num_levels_
};

double binary_entropy(double p);

}  // namespace butterfly
