#include "butterfly/train.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace butterfly {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void clip_l2(std::vector<double>& g, double cap) {
  double n2 = 0.0;
  for (double v : g) n2 += v * v;
  const double n = std::sqrt(n2);
  if (n > cap && n > 0.0) {
    const double s = cap / n;
    for (double& v : g) v *= s;
  }
}

}  // namespace

std::size_t default_max_steps(std::size_t n, std::size_t modules) {
  std::size_t steps = 20000;
  for (std::size_t m = 128; m <= n; m *= 2) steps *= 2;
  // Deeper products settle slower; give them a matching budget.
  if (modules >= 2) steps *= 4;
  return steps;
}

ArchSpec arch_for(TransformKind kind) {
  switch (kind) {
    case TransformKind::Convolution:
      return ArchSpec::bpbp();
    case TransformKind::Dct:
    case TransformKind::Dst: {
      ArchSpec a = ArchSpec::bp();
      a.extra_input_perm = true;
      a.post_real_part = true;
      return a;
    }
    case TransformKind::Dft:
      return ArchSpec::bp();
    default: {
      // Remaining targets are real-valued; fit them as the real part of the
      // complex product.
      ArchSpec a = ArchSpec::bp();
      a.post_real_part = true;
      return a;
    }
  }
}

void AdamState::init(std::size_t size) {
  m.assign(size, 0.0);
  v.assign(size, 0.0);
  t = 0;
}

bool adam_step(std::vector<double>& params, const std::vector<double>& grad,
               AdamState& state, double lr) {
  if (params.size() != grad.size() || state.m.size() != params.size())
    throw std::invalid_argument("adam_step: shape mismatch");
  for (double g : grad)
    if (!std::isfinite(g)) return false;
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  ++state.t;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = b1 * state.m[i] + (1.0 - b1) * grad[i];
    state.v[i] = b2 * state.v[i] + (1.0 - b2) * grad[i] * grad[i];
    params[i] -= lr * (state.m[i] / c1) / (std::sqrt(state.v[i] / c2) + eps);
  }
  return true;
}

namespace {

struct Trial {
  double lr = 0.0;
  bool tie = false;
  std::uint64_t init_seed = 0;
  BPProductModel model;
  AdamState adam;
  std::vector<double> params, grad;
  std::vector<TraceEntry> trace;
  std::size_t steps = 0;
  double last_rmse = kInf;
  double last_objective = kInf;
  bool diverged = false;
  bool early_stopped = false;
};

struct SegmentOptions {
  double entropy_weight = 0.0;
  std::optional<double> grad_clip;
  double early_stop_rmse = 1e-4;
  bool train_logits = true;
};

// Advances one trial to `until` optimizer steps; resumable (Adam state and
// step counter persist).  last_rmse reflects the state after the final step.
void run_segment(Trial& tr, const DenseMatrix& target, const SegmentOptions& opt,
                 std::size_t until) {
  if (tr.diverged || tr.early_stopped) return;
  ObjectiveEvaluator eval(target, opt.entropy_weight, opt.train_logits);
  while (tr.steps < until) {
    const ObjectiveResult res = eval.evaluate_with_gradients(tr.model, tr.grad);
    if (tr.steps % 50 == 0) tr.trace.push_back({tr.steps, res.value, res.rmse});
    tr.last_rmse = res.rmse;
    tr.last_objective = res.value;
    if (!res.finite) {
      tr.diverged = true;
      return;
    }
    if (res.rmse < opt.early_stop_rmse) {
      tr.early_stopped = true;
      return;
    }
    if (opt.grad_clip) clip_l2(tr.grad, *opt.grad_clip);
    if (!adam_step(tr.params, tr.grad, tr.adam, tr.lr)) {
      tr.diverged = true;
      return;
    }
    tr.model.set_params(tr.params, opt.train_logits);
    ++tr.steps;
  }
  const ObjectiveResult res = eval.evaluate(tr.model);
  tr.last_rmse = res.finite ? res.rmse : kInf;
  tr.last_objective = res.finite ? res.value : kInf;
  if (res.finite && res.rmse < opt.early_stop_rmse) tr.early_stopped = true;
  if (!res.finite) tr.diverged = true;
}

HardenedInfo harden_info(const BPProductModel& model) {
  HardenedInfo info;
  for (const BPModel& mod : model.modules()) {
    info.stacks.push_back(mod.permutation.harden());
    info.max_rounding_distance =
        std::max(info.max_rounding_distance, info.stacks.back().max_rounding_distance);
  }
  if (model.extra_input_perm()) {
    info.stacks.push_back(model.extra_input_perm()->harden());
    info.max_rounding_distance =
        std::max(info.max_rounding_distance, info.stacks.back().max_rounding_distance);
  }
  return info;
}

TrainResult finish(Trial&& tr, const DenseMatrix& target, double wall) {
  TrainResult out;
  if (tr.trace.empty() || tr.trace.back().step != tr.steps)
    tr.trace.push_back({tr.steps, tr.last_objective, tr.last_rmse});
  out.final_rmse = frobenius_rmse(target, tr.model.represented());
  out.model = std::move(tr.model);
  out.steps_used = tr.steps;
  out.diverged = tr.diverged;
  out.early_stopped = tr.early_stopped;
  out.lr = tr.lr;
  out.init_seed = tr.init_seed;
  out.tie_logits = tr.tie;
  out.hardened = harden_info(out.model);
  out.trace = std::move(tr.trace);
  out.wall_seconds = wall;
  return out;
}

}  // namespace

TrainResult train(const DenseMatrix& target, const TrainConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = target.rows;
  const std::size_t max_steps =
      config.max_steps ? config.max_steps : default_max_steps(n, config.arch.k);

  Trial tr;
  tr.lr = config.lr;
  tr.tie = config.tie_logits;
  tr.init_seed = config.seed;
  Rng rng(config.seed);
  tr.model = BPProductModel::random(n, config.arch, config.field, config.tie_logits, rng);
  tr.model.get_params(tr.params);
  tr.adam.init(tr.params.size());

  SegmentOptions opt{config.entropy_weight, config.grad_clip, config.early_stop_rmse,
                     true};
  run_segment(tr, target, opt, max_steps);
  return finish(std::move(tr), target, seconds_since(t0));
}

TrainResult train_transform(const TransformSpec& spec, const TrainConfig& config) {
  return train(generate(spec), config);
}

namespace {

template <typename Fn>
void parallel_over(const std::vector<std::size_t>& indices, std::size_t threads, Fn fn) {
  if (threads <= 1 || indices.size() <= 1) {
    for (std::size_t i : indices) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  const std::size_t workers = std::min(threads, indices.size());
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t k; (k = next.fetch_add(1)) < indices.size();) fn(indices[k]);
    });
  for (std::thread& t : pool) t.join();
}

double rank_key(double rmse) { return std::isfinite(rmse) ? rmse : kInf; }

}  // namespace

SearchResult search(const DenseMatrix& target, const SearchConfig& config) {
  if (config.trials < 4) throw std::invalid_argument("search: at least 4 trials required");
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = target.rows;
  const std::size_t max_steps =
      config.max_steps ? config.max_steps : default_max_steps(n, config.arch.k);
  const std::size_t phase1 = std::max<std::size_t>(1, max_steps / 4);

  std::vector<Trial> trials(config.trials);
  for (std::size_t i = 0; i < config.trials; ++i) {
    Rng draw = Rng::derive(config.seed, i);
    Trial& tr = trials[i];
    tr.lr = std::exp(draw.uniform(std::log(1e-4), std::log(0.5)));
    tr.tie = (draw.next_u64() & 1) != 0;
    tr.init_seed = draw.next_u64();
    Rng init(tr.init_seed);
    tr.model = BPProductModel::random(n, config.arch, config.field, tr.tie, init);
    tr.model.get_params(tr.params);
    tr.adam.init(tr.params.size());
  }

  const SegmentOptions opt{config.entropy_weight, config.grad_clip,
                           config.early_stop_rmse, true};

  std::vector<std::size_t> all(config.trials);
  std::iota(all.begin(), all.end(), std::size_t{0});
  parallel_over(all, config.threads,
                [&](std::size_t i) { run_segment(trials[i], target, opt, phase1); });

  std::vector<double> phase1_rmse(config.trials);
  for (std::size_t i = 0; i < config.trials; ++i) phase1_rmse[i] = trials[i].last_rmse;

  std::vector<std::size_t> order = all;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ka = rank_key(phase1_rmse[a]), kb = rank_key(phase1_rmse[b]);
    return ka != kb ? ka < kb : a < b;
  });
  const std::size_t keep = (config.trials + 3) / 4;
  std::vector<std::size_t> survivors(order.begin(), order.begin() + keep);
  std::sort(survivors.begin(), survivors.end());

  parallel_over(survivors, config.threads,
                [&](std::size_t i) { run_segment(trials[i], target, opt, max_steps); });

  SearchResult out;
  out.trials.resize(config.trials);
  std::vector<double> final_rmse(config.trials);
  for (std::size_t i = 0; i < config.trials; ++i) {
    const Trial& tr = trials[i];
    final_rmse[i] = frobenius_rmse(target, tr.model.represented());
    TrialRecord& rec = out.trials[i];
    rec.index = i;
    rec.lr = tr.lr;
    rec.tie_logits = tr.tie;
    rec.init_seed = tr.init_seed;
    rec.phase1_rmse = phase1_rmse[i];
    rec.final_rmse = final_rmse[i];
    rec.steps_used = tr.steps;
    rec.survived = std::find(survivors.begin(), survivors.end(), i) != survivors.end();
    rec.diverged = tr.diverged;
    rec.early_stopped = tr.early_stopped;
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < config.trials; ++i)
    if (rank_key(final_rmse[i]) < rank_key(final_rmse[best])) best = i;
  out.best_trial = best;
  out.wall_seconds = seconds_since(t0);
  out.best = finish(std::move(trials[best]), target, out.wall_seconds);
  return out;
}

SearchResult search_transform(const TransformSpec& spec, const SearchConfig& config) {
  return search(generate(spec), config);
}

TrainResult harden_and_refit(const TrainResult& trained, const DenseMatrix& target,
                             const RefitConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  BPProductModel model = trained.model;

  HardenedInfo info;
  auto replace = [&](RelaxedPermutationStack& stack) {
    RelaxedPermutationStack::Hardened hd = stack.harden();
    info.max_rounding_distance =
        std::max(info.max_rounding_distance, hd.max_rounding_distance);
    stack = RelaxedPermutationStack::from_hard_choices(stack.size(), hd.choices);
    info.stacks.push_back(std::move(hd));
  };
  for (BPModel& mod : model.modules()) replace(mod.permutation);
  if (model.extra_input_perm()) replace(*model.extra_input_perm());

  Trial tr;
  tr.lr = config.lr;
  tr.tie = trained.tie_logits;
  tr.init_seed = trained.init_seed;
  tr.model = std::move(model);
  tr.model.get_params(tr.params, false);
  tr.adam.init(tr.params.size());

  SegmentOptions opt{0.0, std::nullopt, config.early_stop_rmse, false};
  run_segment(tr, target, opt, config.steps);
  TrainResult out = finish(std::move(tr), target, seconds_since(t0));
  out.hardened = std::move(info);
  return out;
}

}  // namespace butterfly
