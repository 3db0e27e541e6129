#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "butterfly/model.hpp"
#include "butterfly/transforms.hpp"

namespace butterfly {

// 20000 at n <= 64, doubled per doubling of n.
std::size_t default_max_steps(std::size_t n, std::size_t modules = 1);

// BP for most targets, BPBP for convolution, BP plus the extra learnable
// input permutation for DCT/DST.
ArchSpec arch_for(TransformKind kind);

struct TrainConfig {
  ArchSpec arch;
  Field field = Field::Complex;
  bool tie_logits = false;
  double lr = 0.05;
  std::size_t max_steps = 0;  // 0: default_max_steps(n, arch.k)
  double early_stop_rmse = 1e-4;
  double entropy_weight = 0.0;
  std::optional<double> grad_clip;  // L2 norm cap, off by default
  std::uint64_t seed = 0;           // init stream
};

struct AdamState {
  std::vector<double> m, v;
  std::size_t t = 0;

  void init(std::size_t size);
};

// Standard bias-corrected Adam (beta1 0.9, beta2 0.999, eps 1e-8).  Returns
// false (no update) when any gradient entry is non-finite.
bool adam_step(std::vector<double>& params, const std::vector<double>& grad,
               AdamState& state, double lr);

struct TraceEntry {
  std::size_t step = 0;
  double objective = 0.0;
  double rmse = 0.0;
};

struct HardenedInfo {
  // module stacks in product order, then the extra input stack if present
  std::vector<RelaxedPermutationStack::Hardened> stacks;
  double max_rounding_distance = 0.0;
};

struct TrainResult {
  BPProductModel model;
  double final_rmse = 0.0;  // frobenius_rmse(target, represented()), recomputed
  std::size_t steps_used = 0;
  bool diverged = false;
  bool early_stopped = false;
  double lr = 0.0;
  std::uint64_t init_seed = 0;
  bool tie_logits = false;
  HardenedInfo hardened;
  std::vector<TraceEntry> trace;  // every 50 steps plus the last
  double wall_seconds = 0.0;
};

TrainResult train(const DenseMatrix& target, const TrainConfig& config);
// Generates the dense target from the spec (scaling as given) and trains.
TrainResult train_transform(const TransformSpec& spec, const TrainConfig& config);

struct SearchConfig {
  ArchSpec arch;
  Field field = Field::Complex;
  std::size_t trials = 16;
  std::size_t max_steps = 0;  // 0: default_max_steps(n, arch.k)
  double early_stop_rmse = 1e-4;
  double entropy_weight = 0.0;
  std::optional<double> grad_clip;
  std::uint64_t seed = 0;  // master; trial i uses Rng::derive(seed, i)
  std::size_t threads = 1;
};

struct TrialRecord {
  std::size_t index = 0;
  double lr = 0.0;
  bool tie_logits = false;
  std::uint64_t init_seed = 0;
  double phase1_rmse = 0.0;
  double final_rmse = 0.0;
  std::size_t steps_used = 0;
  bool survived = false;
  bool diverged = false;
  bool early_stopped = false;
};

struct SearchResult {
  TrainResult best;
  std::size_t best_trial = 0;
  std::vector<TrialRecord> trials;
  double wall_seconds = 0.0;
};

// Successive-halving random search: every trial draws (lr log-uniform on
// [1e-4, 0.5], tie_logits coin, init seed) from its derived stream, runs
// max_steps/4, and the best ceil(trials/4) by phase-1 RMSE resume (optimizer
// state intact) to the full budget.  Best = min final RMSE over all trials,
// ties to the lower index.  Deterministic for fixed seed regardless of
// threads.  Requires trials >= 4.
SearchResult search(const DenseMatrix& target, const SearchConfig& config);
SearchResult search_transform(const TransformSpec& spec, const SearchConfig& config);

struct RefitConfig {
  double lr = 0.01;
  std::size_t steps = 1000;
  double early_stop_rmse = 1e-4;
};

// Rounds every relaxed permutation to its nearest hard choice (logits pinned
// at saturation so application is exactly hard) and re-optimizes butterfly
// entries only.  final_rmse is the hardened model's; hardened.max_rounding_
// distance reports how far the trained probabilities were from {0,1}.
TrainResult harden_and_refit(const TrainResult& trained, const DenseMatrix& target,
                             const RefitConfig& config);

}  // namespace butterfly
