#include "butterfly/permutation.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace butterfly {

namespace {

void require_power_of_two(std::size_t n, const char* what) {
  if (n < 2 || !std::has_single_bit(n))
    throw std::invalid_argument(std::string(what) + ": size must be a power of two >= 2");
}

}  // namespace

HardPermutation HardPermutation::identity(std::size_t n) {
  HardPermutation p;
  p.map.resize(n);
  for (std::size_t i = 0; i < n; ++i) p.map[i] = static_cast<std::uint32_t>(i);
  return p;
}

void HardPermutation::apply(std::span<const Cx> in, std::span<Cx> out) const {
  if (in.size() != map.size() || out.size() != map.size())
    throw std::invalid_argument("HardPermutation::apply: size mismatch");
  for (std::size_t i = 0; i < map.size(); ++i) out[i] = in[map[i]];
}

std::vector<Cx> HardPermutation::apply(std::span<const Cx> in) const {
  std::vector<Cx> out(map.size());
  apply(in, out);
  return out;
}

HardPermutation HardPermutation::inverse() const {
  HardPermutation inv;
  inv.map.resize(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) inv.map[map[i]] = static_cast<std::uint32_t>(i);
  return inv;
}

DenseMatrix HardPermutation::to_matrix() const {
  DenseMatrix m(map.size(), map.size(), Field::Real);
  for (std::size_t i = 0; i < map.size(); ++i) m.at(i, map[i]) = Cx{1.0, 0.0};
  return m;
}

bool HardPermutation::is_valid() const {
  std::vector<bool> seen(map.size(), false);
  for (std::uint32_t t : map) {
    if (t >= map.size() || seen[t]) return false;
    seen[t] = true;
  }
  return true;
}

HardPermutation compose(const HardPermutation& outer, const HardPermutation& inner) {
  if (outer.size() != inner.size())
    throw std::invalid_argument("compose: size mismatch");
  HardPermutation r;
  r.map.resize(outer.size());
  for (std::size_t i = 0; i < outer.size(); ++i) r.map[i] = inner.map[outer.map[i]];
  return r;
}

HardPermutation bit_reversal(std::size_t n) {
  require_power_of_two(n, "bit_reversal");
  const int bits = std::countr_zero(n);
  HardPermutation p;
  p.map.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (int b = 0; b < bits; ++b)
      if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
    p.map[i] = static_cast<std::uint32_t>(r);
  }
  return p;
}

HardPermutation elementary_perm(ElementaryPerm kind, std::size_t n, std::size_t chunk) {
  require_power_of_two(n, "elementary_perm");
  require_power_of_two(chunk, "elementary_perm chunk");
  if (chunk > n || n % chunk != 0)
    throw std::invalid_argument("elementary_perm: chunk must divide n");
  HardPermutation p = HardPermutation::identity(n);
  const std::size_t half = chunk / 2;
  for (std::size_t base = 0; base < n; base += chunk) {
    switch (kind) {
      case ElementaryPerm::EvenOdd:
        for (std::size_t i = 0; i < half; ++i) {
          p.map[base + i] = static_cast<std::uint32_t>(base + 2 * i);
          p.map[base + half + i] = static_cast<std::uint32_t>(base + 2 * i + 1);
        }
        break;
      case ElementaryPerm::ReverseFirstHalf:
        for (std::size_t i = 0; i < half; ++i)
          p.map[base + i] = static_cast<std::uint32_t>(base + half - 1 - i);
        break;
      case ElementaryPerm::ReverseSecondHalf:
        for (std::size_t i = 0; i < half; ++i)
          p.map[base + half + i] = static_cast<std::uint32_t>(base + chunk - 1 - i);
        break;
    }
  }
  return p;
}

double sigmoid(double logit) {
  if (logit >= 0.0) return 1.0 / (1.0 + std::exp(-logit));
  const double e = std::exp(logit);
  return e / (1.0 + e);
}

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
}

RelaxedPermutationStack::RelaxedPermutationStack(std::size_t n, bool tied)
    : n_(n), tied_(tied) {
  require_power_of_two(n, "RelaxedPermutationStack");
  num_levels_ = static_cast<std::size_t>(std::countr_zero(n));
  logits_.assign(tied ? 1 : num_levels_, LevelLogits{});
}

RelaxedPermutationStack RelaxedPermutationStack::from_logits(
    std::size_t n, bool tied, std::vector<LevelLogits> logits) {
  RelaxedPermutationStack s(n, tied);
  if (logits.size() != s.logits_.size())
    throw std::invalid_argument("from_logits: wrong number of logit triples");
  s.logits_ = std::move(logits);
  return s;
}

RelaxedPermutationStack RelaxedPermutationStack::from_hard_choices(
    std::size_t n, std::span<const PermChoice> choices) {
  RelaxedPermutationStack s(n, /*tied=*/false);
  if (choices.size() != s.num_levels_)
    throw std::invalid_argument("from_hard_choices: need one choice per level");
  constexpr double kSaturated = 1000.0;  // sigmoid(+/-1000) is exactly 1.0 / 0.0
  for (std::size_t k = 0; k < s.num_levels_; ++k) {
    s.logits_[k].a = choices[k].even_odd ? kSaturated : -kSaturated;
    s.logits_[k].b = choices[k].reverse_first ? kSaturated : -kSaturated;
    s.logits_[k].c = choices[k].reverse_second ? kSaturated : -kSaturated;
  }
  return s;
}

LevelProbs RelaxedPermutationStack::probabilities(std::size_t level) const {
  const LevelLogits& l = logits(level);
  return LevelProbs{sigmoid(l.a), sigmoid(l.b), sigmoid(l.c)};
}

namespace {

// y[i] = p * x[elem(i)] + (1 - p) * x[i], chunk-wise.  At p exactly 0 or 1
// this reproduces the hard result bit-for-bit (multiplication by 1.0 and
// adding a 0.0 term are exact).
void mixture_apply(ElementaryPerm kind, std::size_t chunk, double p,
                   const Cx* in, Cx* out, std::size_t n) {
  const std::size_t half = chunk / 2;
  const double q = 1.0 - p;
  for (std::size_t base = 0; base < n; base += chunk) {
    switch (kind) {
      case ElementaryPerm::EvenOdd:
        for (std::size_t i = 0; i < half; ++i) {
          out[base + i] = p * in[base + 2 * i] + q * in[base + i];
          out[base + half + i] = p * in[base + 2 * i + 1] + q * in[base + half + i];
        }
        break;
      case ElementaryPerm::ReverseFirstHalf:
        for (std::size_t i = 0; i < half; ++i)
          out[base + i] = p * in[base + half - 1 - i] + q * in[base + i];
        for (std::size_t i = half; i < chunk; ++i) out[base + i] = in[base + i];
        break;
      case ElementaryPerm::ReverseSecondHalf:
        for (std::size_t i = 0; i < half; ++i) out[base + i] = in[base + i];
        for (std::size_t i = half; i < chunk; ++i)
          out[base + i] = p * in[base + half + chunk - 1 - i] + q * in[base + i];
        break;
    }
  }
}

}  // namespace

void RelaxedPermutationStack::apply(std::span<const Cx> in, std::span<Cx> out) const {
  if (in.size() != n_ || out.size() != n_)
    throw std::invalid_argument("RelaxedPermutationStack::apply: size mismatch");
  std::vector<Cx> buf(in.begin(), in.end());
  std::vector<Cx> tmp(n_);
  for (std::size_t k = 0; k < num_levels_; ++k) {
    const std::size_t chunk = chunk_size(k);
    const LevelProbs p = probabilities(k);
    mixture_apply(ElementaryPerm::EvenOdd, chunk, p.a, buf.data(), tmp.data(), n_);
    mixture_apply(ElementaryPerm::ReverseFirstHalf, chunk, p.b, tmp.data(), buf.data(), n_);
    mixture_apply(ElementaryPerm::ReverseSecondHalf, chunk, p.c, buf.data(), tmp.data(), n_);
    std::swap(buf, tmp);
  }
  std::copy(buf.begin(), buf.end(), out.begin());
}

DenseMatrix RelaxedPermutationStack::expand_dense() const {
  DenseMatrix m(n_, n_, Field::Real);
  std::vector<Cx> e(n_, Cx{0.0, 0.0});
  std::vector<Cx> col(n_);
  for (std::size_t j = 0; j < n_; ++j) {
    e[j] = Cx{1.0, 0.0};
    apply(e, col);
    for (std::size_t i = 0; i < n_; ++i) m.at(i, j) = col[i];
    e[j] = Cx{0.0, 0.0};
  }
  return m;
}

RelaxedPermutationStack::Hardened RelaxedPermutationStack::harden() const {
  Hardened h;
  h.choices.resize(num_levels_);
  HardPermutation acc = HardPermutation::identity(n_);
  for (std::size_t k = 0; k < num_levels_; ++k) {
    const std::size_t chunk = chunk_size(k);
    const LevelProbs p = probabilities(k);
    const double probs[3] = {p.a, p.b, p.c};
    const ElementaryPerm kinds[3] = {ElementaryPerm::EvenOdd,
                                     ElementaryPerm::ReverseFirstHalf,
                                     ElementaryPerm::ReverseSecondHalf};
    bool* flags[3] = {&h.choices[k].even_odd, &h.choices[k].reverse_first,
                      &h.choices[k].reverse_second};
    for (int s = 0; s < 3; ++s) {
      const bool on = probs[s] >= 0.5;
      *flags[s] = on;
      h.max_rounding_distance =
          std::max(h.max_rounding_distance, std::abs(probs[s] - (on ? 1.0 : 0.0)));
      if (on) {
        const HardPermutation step = elementary_perm(kinds[s], n_, chunk);
        // step applied after acc: new[i] = acc[step[i]]
        HardPermutation next;
        next.map.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) next.map[i] = acc.map[step.map[i]];
        acc = std::move(next);
      }
    }
  }
  h.permutation = std::move(acc);
  return h;
}

double RelaxedPermutationStack::entropy() const {
  double h = 0.0;
  for (const LevelLogits& l : logits_)
    h += binary_entropy(sigmoid(l.a)) + binary_entropy(sigmoid(l.b)) +
         binary_entropy(sigmoid(l.c));
  return h;
}

void RelaxedPermutationStack::get_logits(std::vector<double>& out) const {
  for (const LevelLogits& l : logits_) {
    out.push_back(l.a);
    out.push_back(l.b);
    out.push_back(l.c);
  }
}

void RelaxedPermutationStack::set_logits(std::span<const double> in) {
  if (in.size() != num_logits())
    throw std::invalid_argument("set_logits: wrong parameter count");
  std::size_t idx = 0;
  for (LevelLogits& l : logits_) {
    l.a = in[idx++];
    l.b = in[idx++];
    l.c = in[idx++];
  }
}

}  // namespace butterfly
