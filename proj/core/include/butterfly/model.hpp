#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "butterfly/butterfly_stack.hpp"
#include "butterfly/dense.hpp"
#include "butterfly/permutation.hpp"
#include "butterfly/rng.hpp"

namespace butterfly {

// One trainable module: a butterfly stack composed with a relaxed
// permutation.  forward(x) = butterfly(permutation(x)).
struct BPModel {
  ButterflyStack butterfly;
  RelaxedPermutationStack permutation;
};

// Architecture descriptor: k BP modules over dimension r*N.  BP = (1,1),
// BPBP = (2,1); r > 1 adds the zero-padding selector of the hierarchy.
// post_real_part fits real-valued targets as Re(product), leaving the
// imaginary part free.
struct ArchSpec {
  std::size_t k = 1;
  std::size_t r = 1;
  bool extra_input_perm = false;
  bool post_real_part = false;

  static ArchSpec bp() { return {1, 1, false, false}; }
  static ArchSpec bpbp() { return {2, 1, false, false}; }
};

// Product of k BP modules over size r*N with the upper-left N x N selector.
// modules[0] is the leftmost factor (applied last); application order is
// modules[k-1], ..., modules[0].  The optional extra input permutation is
// applied before everything else (used for DCT/DST targets).
//
// Trainable parameters, in flattening order: for each module in product
// order, butterfly diagonals (levels ascending, d1..d4, entries ascending;
// complex entries contribute re then im), then the module's permutation
// logits; finally the extra permutation logits.  Logit triples: one per
// stack when tied, else one per level except the final chunk-2 level, whose
// three elementary permutations are structurally the identity (their logits
// stay at initialization and receive no gradient).
class BPProductModel {
 public:
  BPProductModel() = default;

  static BPProductModel random(std::size_t n, const ArchSpec& arch, Field field,
                               bool tie_logits, Rng& rng);

  std::size_t target_size() const { return n_; }
  std::size_t inner_size() const { return rn_; }
  std::size_t expansion() const { return rn_ / n_; }
  Field field() const { return field_; }
  bool post_real_part() const { return post_real_part_; }
  void set_post_real_part(bool v) { post_real_part_ = v; }

  std::vector<BPModel>& modules() { return modules_; }
  const std::vector<BPModel>& modules() const { return modules_; }
  std::optional<RelaxedPermutationStack>& extra_input_perm() { return extra_perm_; }
  const std::optional<RelaxedPermutationStack>& extra_input_perm() const {
    return extra_perm_;
  }

  // Construct from explicit parts (used for warm starts and deserialization).
  static BPProductModel from_parts(std::size_t n, std::size_t r, Field field,
                                   bool post_real_part, std::vector<BPModel> modules,
                                   std::optional<RelaxedPermutationStack> extra);

  // Number of real optimization parameters (complex entries count twice).
  std::size_t num_params(bool include_logits = true) const;
  // Budget semantics: butterfly entries count once regardless of field, plus
  // trainable logits.  Used for baseline budget matching.
  std::size_t param_budget() const;

  void get_params(std::vector<double>& out, bool include_logits = true) const;
  void set_params(std::span<const double> in, bool include_logits = true);

  // y = model(x) through the fast paths (per-vector, not batched).
  std::vector<Cx> apply(std::span<const Cx> x) const;

  // S (prod B_i P_i) S^T (+ real part), computed column-by-column through
  // apply(); independent of the batched training path.
  DenseMatrix represented() const;

  // Trainable logit triples of one stack: tied -> 1, untied -> levels - 1
  // (0 when the stack has a single level).
  static std::size_t trainable_triples(const RelaxedPermutationStack& stack);

 private:
  std::size_t n_ = 0;
  std::size_t rn_ = 0;
  Field field_ = Field::Complex;
  bool post_real_part_ = false;
  std::vector<BPModel> modules_;
  std::optional<RelaxedPermutationStack> extra_perm_;
};

struct ObjectiveResult {
  double value = 0.0;        // data_term + entropy_weight * entropy_term
  double data_term = 0.0;    // (1/N^2) ||T - M||_F^2
  double entropy_term = 0.0; // entropy of trainable logit triples
  double rmse = 0.0;         // sqrt(data_term)
  bool finite = true;
};

// Batched forward/backward evaluator for the full-matrix objective
//   L = (1/N^2) ||T - S (prod B_i P_i) S^T||_F^2 + entropy_weight * H.
// Owns all workspaces; reuse one instance across training steps.  The state
// matrix is processed in column blocks with per-stage checkpoints, so memory
// stays O(stages * rN * block) while gradients accumulate deterministically.
class ObjectiveEvaluator {
 public:
  ObjectiveEvaluator(const DenseMatrix& target, double entropy_weight = 0.0,
                     bool train_logits = true);

  ObjectiveResult evaluate(const BPProductModel& model);
  // grad must have size model.num_params(train_logits); it is overwritten.
  ObjectiveResult evaluate_with_gradients(const BPProductModel& model,
                                          std::vector<double>& grad);

  double entropy_weight() const { return entropy_weight_; }
  bool train_logits() const { return train_logits_; }

 private:
  ObjectiveResult run(const BPProductModel& model, std::vector<double>* grad);

  const DenseMatrix* target_;
  double entropy_weight_;
  bool train_logits_;
  std::size_t block_ = 0;
  std::vector<std::vector<Cx>> stages_;
  std::vector<Cx> adjoint_a_, adjoint_b_;
};

// Convenience wrappers building a one-shot evaluator.
double objective(const BPProductModel& model, const DenseMatrix& target,
                 double entropy_weight = 0.0);
std::vector<double> gradients(const BPProductModel& model, const DenseMatrix& target,
                              double entropy_weight = 0.0, bool train_logits = true);

}  // namespace butterfly
