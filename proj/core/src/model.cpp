#include "butterfly/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace butterfly {

namespace {

std::size_t field_stride(Field f) { return f == Field::Real ? 1 : 2; }

}  // namespace

BPProductModel BPProductModel::random(std::size_t n, const ArchSpec& arch, Field field,
                                      bool tie_logits, Rng& rng) {
  if (arch.k == 0 || arch.r == 0)
    throw std::invalid_argument("BPProductModel: k and r must be positive");
  BPProductModel m;
  m.n_ = n;
  m.rn_ = n * arch.r;
  m.field_ = field;
  m.post_real_part_ = arch.post_real_part;
  m.modules_.reserve(arch.k);
  for (std::size_t i = 0; i < arch.k; ++i) {
    BPModel mod;
    mod.butterfly = ButterflyStack::random(m.rn_, field, rng);
    mod.permutation = RelaxedPermutationStack(m.rn_, tie_logits);
    // Random mild logit init: trials explore distinct permutation basins
    // instead of all starting at the maximally mixed point.
    for (std::size_t t = 0; t < trainable_triples(mod.permutation); ++t) {
      LevelLogits& l = mod.permutation.logits(t);
      l.a = rng.uniform(-2.0, 2.0);
      l.b = rng.uniform(-2.0, 2.0);
      l.c = rng.uniform(-2.0, 2.0);
    }
    m.modules_.push_back(std::move(mod));
  }
  if (arch.extra_input_perm) {
    // Fixed input reindexing (even indices ascending, then odd descending):
    // even-odd plus reverse-second-half at the outermost chunk.  Saturated
    // logits receive zero gradient, so the stack stays hard while training.
    std::vector<PermChoice> choices(RelaxedPermutationStack(m.rn_, false).num_levels());
    choices[0] = PermChoice{true, false, true};
    m.extra_perm_ = RelaxedPermutationStack::from_hard_choices(m.rn_, choices);
  }
  return m;
}

BPProductModel BPProductModel::from_parts(std::size_t n, std::size_t r, Field field,
                                          bool post_real_part,
                                          std::vector<BPModel> modules,
                                          std::optional<RelaxedPermutationStack> extra) {
  if (modules.empty()) throw std::invalid_argument("BPProductModel: no modules");
  BPProductModel m;
  m.n_ = n;
  m.rn_ = n * r;
  m.field_ = field;
  m.post_real_part_ = post_real_part;
  for (const BPModel& mod : modules) {
    if (mod.butterfly.size() != m.rn_ || mod.permutation.size() != m.rn_)
      throw std::invalid_argument("BPProductModel: module size mismatch");
  }
  if (extra && extra->size() != m.rn_)
    throw std::invalid_argument("BPProductModel: extra permutation size mismatch");
  m.modules_ = std::move(modules);
  m.extra_perm_ = std::move(extra);
  return m;
}

std::size_t BPProductModel::trainable_triples(const RelaxedPermutationStack& stack) {
  if (stack.tied()) return 1;
  return stack.num_levels() == 0 ? 0 : stack.num_levels() - 1;
}

std::size_t BPProductModel::num_params(bool include_logits) const {
  const std::size_t stride = field_stride(field_);
  std::size_t count = modules_.size() * stride * (4 * rn_ - 4);
  if (include_logits) {
    for (const BPModel& mod : modules_) count += 3 * trainable_triples(mod.permutation);
    if (extra_perm_) count += 3 * trainable_triples(*extra_perm_);
  }
  return count;
}

std::size_t BPProductModel::param_budget() const {
  std::size_t count = modules_.size() * (4 * rn_ - 4);
  for (const BPModel& mod : modules_) count += 3 * trainable_triples(mod.permutation);
  if (extra_perm_) count += 3 * trainable_triples(*extra_perm_);
  return count;
}

namespace {

template <typename Fn>
void visit_stack_logits(const RelaxedPermutationStack& stack, Fn&& fn) {
  const std::size_t triples = BPProductModel::trainable_triples(stack);
  for (std::size_t t = 0; t < triples; ++t) fn(t);
}

}  // namespace

void BPProductModel::get_params(std::vector<double>& out, bool include_logits) const {
  out.clear();
  out.reserve(num_params(include_logits));
  const bool complex_field = field_ == Field::Complex;
  for (const BPModel& mod : modules_) {
    for (std::size_t l = 0; l < mod.butterfly.num_levels(); ++l) {
      const ButterflyLevel& lvl = mod.butterfly.level(l);
      for (const std::vector<Cx>* d : {&lvl.d1, &lvl.d2, &lvl.d3, &lvl.d4}) {
        for (const Cx& e : *d) {
          out.push_back(e.real());
          if (complex_field) out.push_back(e.imag());
        }
      }
    }
    if (include_logits) {
      visit_stack_logits(mod.permutation, [&](std::size_t t) {
        const LevelLogits& l = mod.permutation.logits(t);
        out.push_back(l.a);
        out.push_back(l.b);
        out.push_back(l.c);
      });
    }
  }
  if (include_logits && extra_perm_) {
    visit_stack_logits(*extra_perm_, [&](std::size_t t) {
      const LevelLogits& l = extra_perm_->logits(t);
      out.push_back(l.a);
      out.push_back(l.b);
      out.push_back(l.c);
    });
  }
}

void BPProductModel::set_params(std::span<const double> in, bool include_logits) {
  if (in.size() != num_params(include_logits))
    throw std::invalid_argument("set_params: wrong parameter count");
  const bool complex_field = field_ == Field::Complex;
  std::size_t idx = 0;
  for (BPModel& mod : modules_) {
    for (std::size_t l = 0; l < mod.butterfly.num_levels(); ++l) {
      ButterflyLevel& lvl = mod.butterfly.level(l);
      for (std::vector<Cx>* d : {&lvl.d1, &lvl.d2, &lvl.d3, &lvl.d4}) {
        for (Cx& e : *d) {
          const double re = in[idx++];
          const double im = complex_field ? in[idx++] : 0.0;
          e = Cx{re, im};
        }
      }
    }
    if (include_logits) {
      visit_stack_logits(mod.permutation, [&](std::size_t t) {
        LevelLogits& l = mod.permutation.logits(t);
        l.a = in[idx++];
        l.b = in[idx++];
        l.c = in[idx++];
      });
    }
  }
  if (include_logits && extra_perm_) {
    visit_stack_logits(*extra_perm_, [&](std::size_t t) {
      LevelLogits& l = extra_perm_->logits(t);
      l.a = in[idx++];
      l.b = in[idx++];
      l.c = in[idx++];
    });
  }
}

std::vector<Cx> BPProductModel::apply(std::span<const Cx> x) const {
  if (x.size() != n_) throw std::invalid_argument("BPProductModel::apply: size mismatch");
  std::vector<Cx> state(rn_, Cx{0.0, 0.0});
  std::copy(x.begin(), x.end(), state.begin());
  std::vector<Cx> tmp(rn_);
  if (extra_perm_) {
    extra_perm_->apply(state, tmp);
    std::swap(state, tmp);
  }
  for (std::size_t i = modules_.size(); i-- > 0;) {
    modules_[i].permutation.apply(state, tmp);
    std::swap(state, tmp);
    modules_[i].butterfly.fast_multiply(state, state);
  }
  std::vector<Cx> out(state.begin(), state.begin() + n_);
  if (post_real_part_)
    for (Cx& e : out) e = Cx{e.real(), 0.0};
  return out;
}

DenseMatrix BPProductModel::represented() const {
  DenseMatrix m(n_, n_, post_real_part_ ? Field::Real : field_);
  std::vector<Cx> e(n_, Cx{0.0, 0.0});
  for (std::size_t j = 0; j < n_; ++j) {
    e[j] = Cx{1.0, 0.0};
    const std::vector<Cx> col = apply(e);
    for (std::size_t i = 0; i < n_; ++i) m.at(i, j) = col[i];
    e[j] = Cx{0.0, 0.0};
  }
  return m;
}

// ---------------------------------------------------------------------------
// Batched evaluator
// ---------------------------------------------------------------------------

namespace {

// One linear stage of the model, acting on the row dimension of the
// row-major (rn x block) state.
struct Stage {
  enum class Kind { Mixture, Butterfly } kind;
  // mixture
  const RelaxedPermutationStack* stack = nullptr;
  std::size_t level = 0;
  ElementaryPerm elem = ElementaryPerm::EvenOdd;
  std::ptrdiff_t logit_offset = -1;  // of this elementary's logit, or -1
  // butterfly
  const ButterflyStack* bfly = nullptr;
  std::size_t blevel = 0;
  std::size_t grad_offset = 0;  // of d1[0] of this level in the flat vector
};

struct Layout {
  std::vector<Stage> stages;          // application order
  std::size_t num_params = 0;
  // (stack, triple, elementary) -> flat offset for the entropy term
  struct TripleRef {
    const RelaxedPermutationStack* stack;
    std::size_t triple;
    std::size_t offset;  // of logit_a
  };
  std::vector<TripleRef> triples;
};

// Offset of the 3-logit group that level `level` of `stack` reads, or -1 if
// that level is frozen (untied final chunk-2 level, or logits not trained).
std::ptrdiff_t level_triple_offset(const RelaxedPermutationStack& stack,
                                   std::size_t level, std::size_t base,
                                   bool train_logits) {
  if (!train_logits) return -1;
  const std::size_t triples = BPProductModel::trainable_triples(stack);
  if (triples == 0) return -1;
  if (stack.tied()) return static_cast<std::ptrdiff_t>(base);
  if (level >= triples) return -1;  // final chunk-2 level: identity, frozen
  return static_cast<std::ptrdiff_t>(base + 3 * level);
}

Layout build_layout(const BPProductModel& model, bool train_logits) {
  Layout lay;
  const std::size_t rn = model.inner_size();
  const std::size_t stride = model.field() == Field::Complex ? 2 : 1;
  const std::size_t per_bfly = stride * (4 * rn - 4);
  const std::size_t k = model.modules().size();

  std::vector<std::size_t> bfly_base(k);
  std::vector<std::size_t> perm_base(k);
  std::size_t off = 0;
  for (std::size_t i = 0; i < k; ++i) {
    bfly_base[i] = off;
    off += per_bfly;
    perm_base[i] = off;
    if (train_logits)
      off += 3 * BPProductModel::trainable_triples(model.modules()[i].permutation);
  }
  std::size_t extra_base = off;
  if (train_logits && model.extra_input_perm())
    off += 3 * BPProductModel::trainable_triples(*model.extra_input_perm());
  lay.num_params = off;

  auto push_perm = [&](const RelaxedPermutationStack& stack, std::size_t base) {
    for (std::size_t lvl = 0; lvl < stack.num_levels(); ++lvl) {
      const std::ptrdiff_t triple = level_triple_offset(stack, lvl, base, train_logits);
      const ElementaryPerm kinds[3] = {ElementaryPerm::EvenOdd,
                                       ElementaryPerm::ReverseFirstHalf,
                                       ElementaryPerm::ReverseSecondHalf};
      for (int s = 0; s < 3; ++s) {
        Stage st;
        st.kind = Stage::Kind::Mixture;
        st.stack = &stack;
        st.level = lvl;
        st.elem = kinds[s];
        st.logit_offset = triple < 0 ? -1 : triple + s;
        lay.stages.push_back(st);
      }
    }
  };

  if (model.extra_input_perm()) push_perm(*model.extra_input_perm(), extra_base);
  for (std::size_t i = k; i-- > 0;) {
    push_perm(model.modules()[i].permutation, perm_base[i]);
    const ButterflyStack& b = model.modules()[i].butterfly;
    for (std::size_t lvl = 0; lvl < b.num_levels(); ++lvl) {
      Stage st;
      st.kind = Stage::Kind::Butterfly;
      st.bfly = &b;
      st.blevel = lvl;
      // entries of levels below lvl: sum 4*2^j = 4(2^lvl - 1)
      st.grad_offset = bfly_base[i] + stride * 4 * ((std::size_t{1} << lvl) - 1);
      lay.stages.push_back(st);
    }
  }

  if (train_logits) {
    auto push_triples = [&](const RelaxedPermutationStack& stack, std::size_t base) {
      const std::size_t triples = BPProductModel::trainable_triples(stack);
      for (std::size_t t = 0; t < triples; ++t)
        lay.triples.push_back({&stack, t, base + 3 * t});
    };
    for (std::size_t i = 0; i < k; ++i)
      push_triples(model.modules()[i].permutation, perm_base[i]);
    if (model.extra_input_perm()) push_triples(*model.extra_input_perm(), extra_base);
  }
  return lay;
}

double stage_prob(const Stage& st) {
  const LevelProbs p = st.stack->probabilities(st.level);
  switch (st.elem) {
    case ElementaryPerm::EvenOdd: return p.a;
    case ElementaryPerm::ReverseFirstHalf: return p.b;
    case ElementaryPerm::ReverseSecondHalf: return p.c;
  }
  return 0.0;
}

// Row index the mixture reads for output row `i` (chunk-relative arithmetic).
inline std::size_t mix_source(ElementaryPerm kind, std::size_t chunk, std::size_t base,
                              std::size_t i) {
  const std::size_t h = chunk / 2;
  switch (kind) {
    case ElementaryPerm::EvenOdd:
      return i < h ? base + 2 * i : base + 2 * (i - h) + 1;
    case ElementaryPerm::ReverseFirstHalf:
      return i < h ? base + h - 1 - i : base + i;
    case ElementaryPerm::ReverseSecondHalf:
      return i < h ? base + i : base + h + chunk - 1 - i;
  }
  return base + i;
}

void mixture_forward(const Stage& st, const Cx* in, Cx* out, std::size_t rn,
                     std::size_t stride, std::size_t w) {
  const std::size_t chunk = st.stack->chunk_size(st.level);
  const double p = stage_prob(st);
  const double q = 1.0 - p;
  for (std::size_t base = 0; base < rn; base += chunk) {
    for (std::size_t i = 0; i < chunk; ++i) {
      const std::size_t dst = base + i;
      const std::size_t src = mix_source(st.elem, chunk, base, i);
      const Cx* rs = in + src * stride;
      const Cx* rd = in + dst * stride;
      Cx* ro = out + dst * stride;
      if (src == dst) {
        std::copy(rd, rd + w, ro);
      } else {
        for (std::size_t c = 0; c < w; ++c) ro[c] = p * rs[c] + q * rd[c];
      }
    }
  }
}

// in: checkpoint of the stage input; oadj: adjoint of the stage output.
// Writes the input adjoint into iadj and accumulates the logit gradient.
void mixture_backward(const Stage& st, const Cx* in, const Cx* oadj, Cx* iadj,
                      std::size_t rn, std::size_t stride, std::size_t w,
                      std::vector<double>* grad) {
  const std::size_t chunk = st.stack->chunk_size(st.level);
  const double p = stage_prob(st);
  const double q = 1.0 - p;
  std::fill(iadj, iadj + rn * stride, Cx{0.0, 0.0});
  double pbar = 0.0;
  const bool want_logit = grad != nullptr && st.logit_offset >= 0;
  for (std::size_t base = 0; base < rn; base += chunk) {
    for (std::size_t i = 0; i < chunk; ++i) {
      const std::size_t dst = base + i;
      const std::size_t src = mix_source(st.elem, chunk, base, i);
      const Cx* oa = oadj + dst * stride;
      if (src == dst) {
        Cx* ia = iadj + dst * stride;
        for (std::size_t c = 0; c < w; ++c) ia[c] += oa[c];
        continue;
      }
      Cx* ia_src = iadj + src * stride;
      Cx* ia_dst = iadj + dst * stride;
      for (std::size_t c = 0; c < w; ++c) {
        ia_src[c] += p * oa[c];
        ia_dst[c] += q * oa[c];
      }
      if (want_logit) {
        const Cx* rs = in + src * stride;
        const Cx* rd = in + dst * stride;
        for (std::size_t c = 0; c < w; ++c) {
          const Cx diff = rs[c] - rd[c];
          pbar += diff.real() * oa[c].real() + diff.imag() * oa[c].imag();
        }
      }
    }
  }
  if (want_logit) {
    // d p / d logit = p (1 - p); exact 0 at saturation.
    (*grad)[static_cast<std::size_t>(st.logit_offset)] += pbar * p * q;
  }
}

void butterfly_forward(const Stage& st, const Cx* in, Cx* out, std::size_t rn,
                       std::size_t stride, std::size_t w) {
  const ButterflyLevel& lvl = st.bfly->level(st.blevel);
  const std::size_t h = lvl.half();
  const std::size_t block = 2 * h;
  for (std::size_t base = 0; base < rn; base += block) {
    for (std::size_t t = 0; t < h; ++t) {
      const Cx* u = in + (base + t) * stride;
      const Cx* v = in + (base + h + t) * stride;
      Cx* yp = out + (base + t) * stride;
      Cx* yq = out + (base + h + t) * stride;
      const double d1r = lvl.d1[t].real(), d1i = lvl.d1[t].imag();
      const double d2r = lvl.d2[t].real(), d2i = lvl.d2[t].imag();
      const double d3r = lvl.d3[t].real(), d3i = lvl.d3[t].imag();
      const double d4r = lvl.d4[t].real(), d4i = lvl.d4[t].imag();
      for (std::size_t c = 0; c < w; ++c) {
        const double ur = u[c].real(), ui = u[c].imag();
        const double vr = v[c].real(), vi = v[c].imag();
        yp[c] = Cx{d1r * ur - d1i * ui + d2r * vr - d2i * vi,
                   d1r * ui + d1i * ur + d2r * vi + d2i * vr};
        yq[c] = Cx{d3r * ur - d3i * ui + d4r * vr - d4i * vi,
                   d3r * ui + d3i * ur + d4r * vi + d4i * vr};
      }
    }
  }
}

void butterfly_backward(const Stage& st, const Cx* in, const Cx* oadj, Cx* iadj,
                        std::size_t rn, std::size_t stride_cols, std::size_t w,
                        Field field, std::vector<double>* grad) {
  const ButterflyLevel& lvl = st.bfly->level(st.blevel);
  const std::size_t h = lvl.half();
  const std::size_t block = 2 * h;
  const std::size_t pstride = field == Field::Complex ? 2 : 1;
  for (std::size_t base = 0; base < rn; base += block) {
    for (std::size_t t = 0; t < h; ++t) {
      const Cx* u = in + (base + t) * stride_cols;
      const Cx* v = in + (base + h + t) * stride_cols;
      const Cx* ap = oadj + (base + t) * stride_cols;
      const Cx* aq = oadj + (base + h + t) * stride_cols;
      Cx* iu = iadj + (base + t) * stride_cols;
      Cx* iv = iadj + (base + h + t) * stride_cols;
      const double d1r = lvl.d1[t].real(), d1i = lvl.d1[t].imag();
      const double d2r = lvl.d2[t].real(), d2i = lvl.d2[t].imag();
      const double d3r = lvl.d3[t].real(), d3i = lvl.d3[t].imag();
      const double d4r = lvl.d4[t].real(), d4i = lvl.d4[t].imag();
      double g1r = 0, g1i = 0, g2r = 0, g2i = 0, g3r = 0, g3i = 0, g4r = 0, g4i = 0;
      for (std::size_t c = 0; c < w; ++c) {
        const double apr = ap[c].real(), api = ap[c].imag();
        const double aqr = aq[c].real(), aqi = aq[c].imag();
        const double ur = u[c].real(), ui = u[c].imag();
        const double vr = v[c].real(), vi = v[c].imag();
        // input adjoints: conj(d) * out-adjoint
        iu[c] = Cx{d1r * apr + d1i * api + d3r * aqr + d3i * aqi,
                   d1r * api - d1i * apr + d3r * aqi - d3i * aqr};
        iv[c] = Cx{d2r * apr + d2i * api + d4r * aqr + d4i * aqi,
                   d2r * api - d2i * apr + d4r * aqi - d4i * aqr};
        // parameter adjoints: conj(input) * out-adjoint
        g1r += ur * apr + ui * api;
        g1i += ur * api - ui * apr;
        g2r += vr * apr + vi * api;
        g2i += vr * api - vi * apr;
        g3r += ur * aqr + ui * aqi;
        g3i += ur * aqi - ui * aqr;
        g4r += vr * aqr + vi * aqi;
        g4i += vr * aqi - vi * aqr;
      }
      if (grad) {
        std::vector<double>& g = *grad;
        const std::size_t o = st.grad_offset;
        const double gr[4] = {g1r, g2r, g3r, g4r};
        const double gi[4] = {g1i, g2i, g3i, g4i};
        for (std::size_t dslot = 0; dslot < 4; ++dslot) {
          const std::size_t at = o + pstride * (dslot * h + t);
          g[at] += gr[dslot];
          if (pstride == 2) g[at + 1] += gi[dslot];
        }
      }
    }
  }
}

}  // namespace

ObjectiveEvaluator::ObjectiveEvaluator(const DenseMatrix& target, double entropy_weight,
                                       bool train_logits)
    : target_(&target), entropy_weight_(entropy_weight), train_logits_(train_logits) {
  if (target.rows != target.cols)
    throw std::invalid_argument("ObjectiveEvaluator: target must be square");
}

ObjectiveResult ObjectiveEvaluator::evaluate(const BPProductModel& model) {
  return run(model, nullptr);
}

ObjectiveResult ObjectiveEvaluator::evaluate_with_gradients(const BPProductModel& model,
                                                            std::vector<double>& grad) {
  grad.assign(model.num_params(train_logits_), 0.0);
  return run(model, &grad);
}

ObjectiveResult ObjectiveEvaluator::run(const BPProductModel& model,
                                        std::vector<double>* grad) {
  const std::size_t n = model.target_size();
  const std::size_t rn = model.inner_size();
  if (target_->rows != n)
    throw std::invalid_argument("ObjectiveEvaluator: target/model size mismatch");

  const Layout lay = build_layout(model, train_logits_);
  if (grad && grad->size() != lay.num_params)
    throw std::invalid_argument("ObjectiveEvaluator: bad gradient size");

  const std::size_t block = std::min<std::size_t>(64, n);
  if (block_ != block || stages_.size() != lay.stages.size() + 1 ||
      (!stages_.empty() && stages_[0].size() != rn * block)) {
    block_ = block;
    stages_.assign(lay.stages.size() + 1, std::vector<Cx>(rn * block));
    adjoint_a_.assign(rn * block, Cx{});
    adjoint_b_.assign(rn * block, Cx{});
  }

  const bool re_out = model.post_real_part();
  const double inv_n2 = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
  double sq_sum = 0.0;

  for (std::size_t col0 = 0; col0 < n; col0 += block) {
    const std::size_t w = std::min(block, n - col0);
    // stage 0: columns of [I_N; 0]
    std::vector<Cx>& s0 = stages_[0];
    std::fill(s0.begin(), s0.end(), Cx{0.0, 0.0});
    for (std::size_t c = 0; c < w; ++c) s0[(col0 + c) * block + c] = Cx{1.0, 0.0};

    for (std::size_t s = 0; s < lay.stages.size(); ++s) {
      const Stage& st = lay.stages[s];
      const Cx* in = stages_[s].data();
      Cx* out = stages_[s + 1].data();
      if (st.kind == Stage::Kind::Mixture)
        mixture_forward(st, in, out, rn, block, w);
      else
        butterfly_forward(st, in, out, rn, block, w);
    }

    const std::vector<Cx>& fin = stages_[lay.stages.size()];
    Cx* adj = adjoint_a_.data();
    if (grad) std::fill(adjoint_a_.begin(), adjoint_a_.end(), Cx{0.0, 0.0});
    for (std::size_t row = 0; row < n; ++row) {
      const Cx* fr = fin.data() + row * block;
      const Cx* tr = target_->row(row) + col0;
      Cx* ar = adj + row * block;
      if (re_out) {
        for (std::size_t c = 0; c < w; ++c) {
          const double dre = fr[c].real() - tr[c].real();
          const double dim = -tr[c].imag();
          sq_sum += dre * dre + dim * dim;
          if (grad) ar[c] = Cx{2.0 * inv_n2 * dre, 0.0};
        }
      } else {
        for (std::size_t c = 0; c < w; ++c) {
          const Cx d = fr[c] - tr[c];
          sq_sum += d.real() * d.real() + d.imag() * d.imag();
          if (grad) ar[c] = 2.0 * inv_n2 * d;
        }
      }
    }

    if (grad) {
      Cx* oadj = adjoint_a_.data();
      Cx* iadj = adjoint_b_.data();
      for (std::size_t s = lay.stages.size(); s-- > 0;) {
        const Stage& st = lay.stages[s];
        const Cx* in = stages_[s].data();
        if (st.kind == Stage::Kind::Mixture)
          mixture_backward(st, in, oadj, iadj, rn, block, w, grad);
        else
          butterfly_backward(st, in, oadj, iadj, rn, block, w, model.field(), grad);
        std::swap(oadj, iadj);
      }
    }
  }

  ObjectiveResult res;
  res.data_term = sq_sum * inv_n2;
  res.rmse = std::sqrt(res.data_term);

  double entropy = 0.0;
  for (const Layout::TripleRef& ref : lay.triples) {
    const LevelLogits& l = ref.stack->logits(ref.triple);
    const double logits[3] = {l.a, l.b, l.c};
    for (int s = 0; s < 3; ++s) {
      const double p = sigmoid(logits[s]);
      entropy += binary_entropy(p);
      if (grad && entropy_weight_ != 0.0) {
        const double pq = p * (1.0 - p);
        if (pq > 0.0)
          (*grad)[ref.offset + s] +=
              entropy_weight_ * std::log((1.0 - p) / p) * pq;
      }
    }
  }
  res.entropy_term = entropy;
  res.value = res.data_term + entropy_weight_ * entropy;
  res.finite = std::isfinite(res.value);
  if (grad && res.finite) {
    for (double g : *grad)
      if (!std::isfinite(g)) {
        res.finite = false;
        break;
      }
  }
  return res;
}

double objective(const BPProductModel& model, const DenseMatrix& target,
                 double entropy_weight) {
  ObjectiveEvaluator ev(target, entropy_weight);
  return ev.evaluate(model).value;
}

std::vector<double> gradients(const BPProductModel& model, const DenseMatrix& target,
                              double entropy_weight, bool train_logits) {
  ObjectiveEvaluator ev(target, entropy_weight, train_logits);
  std::vector<double> g;
  ev.evaluate_with_gradients(model, g);
  return g;
}

}  // namespace butterfly
