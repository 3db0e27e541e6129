#include "butterfly/exact.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "butterfly/orthopoly.hpp"
#include "butterfly/rng.hpp"
#include "butterfly/transforms.hpp"

namespace butterfly {

namespace {

constexpr double kPi = std::numbers::pi;

void check_pow2(std::size_t n, const char* what) {
  if (n < 2 || !std::has_single_bit(n))
    throw std::invalid_argument(std::string(what) + ": size must be a power of two >= 2");
}

std::size_t log2_of(std::size_t n) {
  return static_cast<std::size_t>(std::bit_width(n)) - 1;
}

// Decimation-in-time radix-2 stack; level i couples strides 2^i with
// twiddles e^{sign * 2 pi i t / 2^(i+1)} (sign = -1 forward).
ButterflyStack fourier_stack(std::size_t n, double sign) {
  const std::size_t m = log2_of(n);
  std::vector<ButterflyLevel> levels(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t h = std::size_t{1} << i;
    ButterflyLevel& lvl = levels[i];
    lvl.d1.assign(h, Cx{1.0, 0.0});
    lvl.d2.resize(h);
    lvl.d3.assign(h, Cx{1.0, 0.0});
    lvl.d4.resize(h);
    for (std::size_t t = 0; t < h; ++t) {
      const Cx w = std::polar(1.0, sign * kPi * static_cast<double>(t) /
                                       static_cast<double>(h));
      lvl.d2[t] = w;
      lvl.d4[t] = -w;
    }
  }
  return ButterflyStack::from_levels(n, Field::Complex, std::move(levels));
}

// Folds diag(s) on the output side into the outermost level: output row p
// is scaled by s[p].
void fold_output_diag(ButterflyStack& stack, std::span<const Cx> s) {
  ButterflyLevel& top = stack.level(stack.num_levels() - 1);
  const std::size_t h = top.half();
  for (std::size_t t = 0; t < h; ++t) {
    top.d1[t] *= s[t];
    top.d2[t] *= s[t];
    top.d3[t] *= s[h + t];
    top.d4[t] *= s[h + t];
  }
}

}  // namespace

void BPModuleExact::apply(std::span<const Cx> in, std::span<Cx> out) const {
  permutation.apply(in, out);
  butterfly.fast_multiply(out, out);
}

DenseMatrix BPModuleExact::expand() const {
  const std::size_t n = size();
  DenseMatrix m(n, n, Field::Complex);
  std::vector<Cx> e(n, Cx{0.0, 0.0});
  std::vector<Cx> col(n);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = Cx{1.0, 0.0};
    apply(e, col);
    for (std::size_t i = 0; i < n; ++i) m.at(i, j) = col[i];
    e[j] = Cx{0.0, 0.0};
  }
  return m;
}

std::vector<Cx> BPProductExact::apply(std::span<const Cx> x) const {
  if (x.size() != n) throw std::invalid_argument("BPProductExact::apply: size mismatch");
  const std::size_t rn = inner_size();
  std::vector<Cx> state(rn, Cx{0.0, 0.0});
  std::copy(x.begin(), x.end(), state.begin());
  std::vector<Cx> tmp(rn);
  for (std::size_t i = modules.size(); i-- > 0;) {
    modules[i].permutation.apply(state, tmp);
    modules[i].butterfly.fast_multiply(tmp, state);
  }
  std::vector<Cx> out(state.begin(), state.begin() + n);
  if (post_real_part)
    for (Cx& e : out) e = Cx{e.real(), 0.0};
  return out;
}

DenseMatrix BPProductExact::represented() const {
  DenseMatrix m(n, n, post_real_part ? Field::Real : Field::Complex);
  std::vector<Cx> e(n, Cx{0.0, 0.0});
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = Cx{1.0, 0.0};
    const std::vector<Cx> col = apply(e);
    for (std::size_t i = 0; i < n; ++i) m.at(i, j) = col[i];
    e[j] = Cx{0.0, 0.0};
  }
  return m;
}

BPProductExact BPProductExact::wrap(std::size_t n, BPModuleExact module) {
  BPProductExact p;
  p.n = n;
  p.r = 1;
  p.modules.push_back(std::move(module));
  return p;
}

BPModuleExact fft_bp(std::size_t n) {
  check_pow2(n, "fft_bp");
  return {fourier_stack(n, -1.0), bit_reversal(n)};
}

BPModuleExact ifft_bp(std::size_t n) {
  check_pow2(n, "ifft_bp");
  ButterflyStack stack = fourier_stack(n, +1.0);
  const std::vector<Cx> inv_n(n, Cx{1.0 / static_cast<double>(n), 0.0});
  fold_output_diag(stack, inv_n);
  return {std::move(stack), bit_reversal(n)};
}

BPModuleExact hadamard_bp(std::size_t n) {
  check_pow2(n, "hadamard_bp");
  const std::size_t m = log2_of(n);
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<ButterflyLevel> levels(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t h = std::size_t{1} << i;
    levels[i].d1.assign(h, Cx{s, 0.0});
    levels[i].d2.assign(h, Cx{s, 0.0});
    levels[i].d3.assign(h, Cx{s, 0.0});
    levels[i].d4.assign(h, Cx{-s, 0.0});
  }
  return {ButterflyStack::from_levels(n, Field::Real, std::move(levels)),
          HardPermutation::identity(n)};
}

HardPermutation dct_input_permutation(std::size_t n) {
  check_pow2(n, "dct_input_permutation");
  HardPermutation p;
  p.map.resize(n);
  const std::size_t h = n / 2;
  for (std::size_t i = 0; i < n; ++i)
    p.map[i] = static_cast<std::uint32_t>(i < h ? 2 * i : 2 * (n - 1 - i) + 1);
  return p;
}

BPProductExact dct_bp2(std::size_t n) {
  check_pow2(n, "dct_bp2");
  BPModuleExact left = fft_bp(n);
  std::vector<Cx> s(n);
  for (std::size_t k = 0; k < n; ++k)
    s[k] = std::polar(1.0, -kPi * static_cast<double>(k) / (2.0 * static_cast<double>(n)));
  fold_output_diag(left.butterfly, s);

  BPModuleExact right{ButterflyStack::identity(n, Field::Complex),
                      dct_input_permutation(n)};
  BPProductExact p;
  p.n = n;
  p.r = 1;
  p.post_real_part = true;
  p.modules.push_back(std::move(left));
  p.modules.push_back(std::move(right));
  return p;
}

BPProductExact dst_bp2(std::size_t n) {
  check_pow2(n, "dst_bp2");
  const std::size_t m = log2_of(n);

  BPModuleExact left = fft_bp(n);
  std::vector<Cx> s(n);
  for (std::size_t k = 0; k < n; ++k)
    s[k] = std::polar(1.0, kPi / 2.0 - kPi * static_cast<double>(k + 1) /
                               (2.0 * static_cast<double>(n)));
  fold_output_diag(left.butterfly, s);

  // diag(e^{-2 pi i p / n}) * diag(I, -I), split across levels by the binary
  // digits of p; the sign flip keys on the top bit.
  std::vector<ButterflyLevel> levels(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t h = std::size_t{1} << i;
    Cx w = std::polar(1.0, -2.0 * kPi * static_cast<double>(h) / static_cast<double>(n));
    if (i + 1 == m) w = -w;
    levels[i].d1.assign(h, Cx{1.0, 0.0});
    levels[i].d2.assign(h, Cx{0.0, 0.0});
    levels[i].d3.assign(h, Cx{0.0, 0.0});
    levels[i].d4.assign(h, w);
  }
  BPModuleExact right{ButterflyStack::from_levels(n, Field::Complex, std::move(levels)),
                      dct_input_permutation(n)};

  BPProductExact p;
  p.n = n;
  p.r = 1;
  p.post_real_part = true;
  p.modules.push_back(std::move(left));
  p.modules.push_back(std::move(right));
  return p;
}

BPProductExact circulant_bp2(std::span<const Cx> h) {
  const std::size_t n = h.size();
  check_pow2(n, "circulant_bp2");
  BPModuleExact fwd = fft_bp(n);
  std::vector<Cx> fh(n);
  fwd.apply(h, fh);

  BPModuleExact right = fft_bp(n);
  fold_output_diag(right.butterfly, fh);

  BPProductExact p;
  p.n = n;
  p.r = 1;
  p.modules.push_back(ifft_bp(n));
  p.modules.push_back(std::move(right));
  return p;
}

BPProductExact toeplitz_bp2r2(std::span<const Cx> t) {
  if (t.size() % 2 == 0 || t.size() < 3)
    throw std::invalid_argument("toeplitz_bp2r2: symbol length must be odd, 2n-1");
  const std::size_t n = (t.size() + 1) / 2;
  check_pow2(n, "toeplitz_bp2r2");
  // first circulant column [t_0 .. t_{n-1}, 0, t_{-(n-1)} .. t_{-1}]
  std::vector<Cx> c(2 * n, Cx{0.0, 0.0});
  for (std::size_t j = 0; j < n; ++j) c[j] = t[j + n - 1];
  for (std::size_t i = 1; i < n; ++i) c[n + i] = t[i - 1];

  BPProductExact inner = circulant_bp2(c);
  BPProductExact p;
  p.n = n;
  p.r = 2;
  p.modules = std::move(inner.modules);
  return p;
}

bool VerifyReport::all_passed() const {
  for (const VerifyRow& r : rows)
    if (!r.passed) return false;
  return true;
}

namespace {

void add_row(VerifyReport& rep, std::string name, std::size_t n, double err,
             double threshold) {
  rep.rows.push_back({std::move(name), n, err, threshold, err < threshold});
}

std::vector<Cx> random_toeplitz_symbol(std::size_t n, std::uint64_t seed) {
  Rng rng = Rng::derive(seed, 0x746f65706cULL ^ n);
  std::vector<Cx> t(2 * n - 1);
  double norm2 = 0.0;
  for (Cx& e : t) {
    e = Cx{rng.gaussian(0.0, 1.0), rng.gaussian(0.0, 1.0)};
    norm2 += std::norm(e);
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (Cx& e : t) e *= inv;
  return t;
}

}  // namespace

VerifyReport verify_exact(const VerifyOptions& options) {
  VerifyReport rep;
  const std::size_t cap = options.max_n < 2 ? 2 : options.max_n;

  for (std::size_t n = 2; n <= cap; n *= 2) {
    BPModuleExact fft = fft_bp(n);
    if (options.inject_twiddle_error)
      fft.butterfly.level(fft.butterfly.num_levels() - 1).d2[0] += Cx{1e-6, 0.0};
    const DenseMatrix dft = generate({TransformKind::Dft, n, Scaling::Raw, 0});
    add_row(rep, "dft", n, max_abs_diff(fft.expand(), dft), 1e-10);
  }
  for (std::size_t n = 2; n <= cap; n *= 2) {
    // inverse oracle: (1/n) conj(F)
    DenseMatrix inv = generate({TransformKind::Dft, n, Scaling::Raw, 0});
    for (Cx& e : inv.entries) e = std::conj(e) / static_cast<double>(n);
    add_row(rep, "idft", n, max_abs_diff(ifft_bp(n).expand(), inv), 1e-10);
  }
  for (std::size_t n = 2; n <= cap; n *= 2) {
    const DenseMatrix had = generate({TransformKind::Hadamard, n, Scaling::Raw, 0});
    add_row(rep, "hadamard", n, max_abs_diff(hadamard_bp(n).expand(), had), 1e-10);
  }
  for (std::size_t n = 2; n <= cap; n *= 2) {
    const std::vector<Cx> h = convolution_filter(n, options.seed);
    add_row(rep, "circulant", n,
            max_abs_diff(circulant_bp2(h).represented(), circulant(h)), 1e-9);
  }
  for (std::size_t n = 2; n <= cap; n *= 2) {
    const DenseMatrix dct = generate({TransformKind::Dct, n, Scaling::Raw, 0});
    add_row(rep, "dct", n, max_abs_diff(dct_bp2(n).represented(), dct), 1e-9);
  }
  for (std::size_t n = 2; n <= cap; n *= 2) {
    const DenseMatrix dst = generate({TransformKind::Dst, n, Scaling::Raw, 0});
    add_row(rep, "dst", n, max_abs_diff(dst_bp2(n).represented(), dst), 1e-9);
  }
  for (std::size_t n = 2; n <= std::min<std::size_t>(cap, 512); n *= 2) {
    const std::vector<Cx> t = random_toeplitz_symbol(n, options.seed);
    add_row(rep, "toeplitz", n,
            max_abs_diff(toeplitz_bp2r2(t).represented(), toeplitz(t)), 1e-9);
  }
  for (std::size_t n = 2; n <= std::min<std::size_t>(cap, 64); n *= 2) {
    const std::vector<Poly> fact = orthopoly_polynomials(n, legendre_recurrence);
    double rel = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const std::vector<double> ref = legendre_poly_coeffs(static_cast<unsigned>(k));
      double num = 0.0, den = 0.0;
      for (std::size_t c = 0; c < ref.size(); ++c) {
        const double f = c < fact[k].size() ? fact[k][c] : 0.0;
        num = std::max(num, std::abs(f - ref[c]));
        den = std::max(den, std::abs(ref[c]));
      }
      for (std::size_t c = ref.size(); c < fact[k].size(); ++c)
        num = std::max(num, std::abs(fact[k][c]));
      rel = std::max(rel, num / std::max(den, 1.0));
    }
    add_row(rep, "legendre", n, rel, 1e-8);
  }
  return rep;
}

}  // namespace butterfly
