#include "butterfly/butterfly_stack.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace butterfly {

namespace {

std::size_t checked_levels(std::size_t n) {
  if (n < 2 || !std::has_single_bit(n))
    throw std::invalid_argument("ButterflyStack: size must be a power of two >= 2");
  return static_cast<std::size_t>(std::countr_zero(n));
}

}  // namespace

ButterflyStack ButterflyStack::identity(std::size_t n, Field field) {
  const std::size_t m = checked_levels(n);
  ButterflyStack s;
  s.n_ = n;
  s.field_ = field;
  s.levels_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t h = std::size_t{1} << i;
    s.levels_[i].d1.assign(h, Cx{1.0, 0.0});
    s.levels_[i].d2.assign(h, Cx{0.0, 0.0});
    s.levels_[i].d3.assign(h, Cx{0.0, 0.0});
    s.levels_[i].d4.assign(h, Cx{1.0, 0.0});
  }
  return s;
}

ButterflyStack ButterflyStack::random(std::size_t n, Field field, Rng& rng) {
  ButterflyStack s = identity(n, field);
  for (ButterflyLevel& lvl : s.levels_) {
    for (std::vector<Cx>* d : {&lvl.d1, &lvl.d2, &lvl.d3, &lvl.d4}) {
      for (Cx& e : *d) {
        if (field == Field::Real) {
          e = Cx{rng.gaussian(0.0, 0.5), 0.0};
        } else {
          const double re = rng.gaussian(0.0, 0.25);
          const double im = rng.gaussian(0.0, 0.25);
          e = Cx{re, im};
        }
      }
    }
  }
  return s;
}

ButterflyStack ButterflyStack::from_levels(std::size_t n, Field field,
                                           std::vector<ButterflyLevel> levels) {
  const std::size_t m = checked_levels(n);
  if (levels.size() != m)
    throw std::invalid_argument("ButterflyStack: wrong level count");
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t h = std::size_t{1} << i;
    if (levels[i].d1.size() != h || levels[i].d2.size() != h ||
        levels[i].d3.size() != h || levels[i].d4.size() != h)
      throw std::invalid_argument("ButterflyStack: wrong diagonal length");
  }
  ButterflyStack s;
  s.n_ = n;
  s.field_ = field;
  s.levels_ = std::move(levels);
  return s;
}

void ButterflyStack::apply_level(std::size_t i, std::span<Cx> x) const {
  const ButterflyLevel& lvl = levels_[i];
  const std::size_t h = lvl.half();
  const std::size_t block = 2 * h;
  for (std::size_t base = 0; base < n_; base += block) {
    Cx* top = x.data() + base;
    Cx* bot = top + h;
    for (std::size_t t = 0; t < h; ++t) {
      const Cx u = top[t];
      const Cx v = bot[t];
      top[t] = lvl.d1[t] * u + lvl.d2[t] * v;
      bot[t] = lvl.d3[t] * u + lvl.d4[t] * v;
    }
  }
}

void ButterflyStack::fast_multiply(std::span<const Cx> in, std::span<Cx> out) const {
  if (in.size() != n_ || out.size() != n_)
    throw std::invalid_argument("fast_multiply: size mismatch");
  if (out.data() != in.data()) std::copy(in.begin(), in.end(), out.begin());
  for (std::size_t i = 0; i < levels_.size(); ++i) apply_level(i, out);
}

std::vector<Cx> ButterflyStack::fast_multiply(std::span<const Cx> in) const {
  std::vector<Cx> out(n_);
  fast_multiply(in, out);
  return out;
}

DenseMatrix ButterflyStack::expand_dense() const {
  DenseMatrix m(n_, n_, field_);
  std::vector<Cx> col(n_);
  for (std::size_t j = 0; j < n_; ++j) {
    std::fill(col.begin(), col.end(), Cx{0.0, 0.0});
    col[j] = Cx{1.0, 0.0};
    for (std::size_t i = 0; i < levels_.size(); ++i) apply_level(i, col);
    for (std::size_t i = 0; i < n_; ++i) m.at(i, j) = col[i];
  }
  return m;
}

}  // namespace butterfly
