#include "butterfly/transforms.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "butterfly/rng.hpp"

namespace butterfly {

namespace {

constexpr double kPi = std::numbers::pi;

void require_power_of_two(std::size_t n) {
  if (n < 2 || !std::has_single_bit(n))
    throw std::invalid_argument("transform size must be a power of two >= 2");
}

// Seed-stream tags keep the filter and matrix draws of one (seed, N) pair
// decoupled from any other consumer of the same master seed.
constexpr std::uint64_t kFilterStream = 0x66696c7465720000ULL;
constexpr std::uint64_t kRandnStream = 0x72616e646e000000ULL;

}  // namespace

std::vector<Cx> convolution_filter(std::size_t n, std::uint64_t seed) {
  require_power_of_two(n);
  Rng rng = Rng::derive(seed, kFilterStream ^ n);
  std::vector<Cx> h(n);
  double norm = 0.0;
  for (Cx& e : h) {
    const double re = rng.gaussian(0.0, 1.0);
    const double im = rng.gaussian(0.0, 1.0);
    e = Cx{re, im};
    norm += std::norm(e);
  }
  norm = std::sqrt(norm);
  for (Cx& e : h) e /= norm;
  return h;
}

DenseMatrix circulant(std::span<const Cx> h) {
  const std::size_t n = h.size();
  DenseMatrix a(n, n, Field::Complex);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) a.at(j, k) = h[(j + n - k) % n];
  return a;
}

DenseMatrix toeplitz(std::span<const Cx> t) {
  if (t.size() % 2 == 0 || t.empty())
    throw std::invalid_argument("toeplitz: need 2N-1 diagonal values");
  const std::size_t n = (t.size() + 1) / 2;
  DenseMatrix a(n, n, Field::Complex);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) a.at(j, k) = t[j - k + n - 1];
  return a;
}

double legendre_value(unsigned k, double x) {
  if (k == 0) return 1.0;
  double prev = 1.0;       // L_0
  double cur = x;          // L_1
  for (unsigned j = 2; j <= k; ++j) {
    const double next =
        ((2.0 * j - 1.0) * x * cur - (j - 1.0) * prev) / static_cast<double>(j);
    prev = cur;
    cur = next;
  }
  return cur;
}

void gauss_legendre_nodes(std::size_t n, std::vector<double>& nodes,
                          std::vector<double>& weights) {
  nodes.resize(n);
  weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Newton from the Chebyshev-angle estimate; roots are simple and the
    // iteration converges in a handful of steps.
    double x = std::cos(kPi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    for (int it = 0; it < 64; ++it) {
      const double p = legendre_value(static_cast<unsigned>(n), x);
      const double pm1 = legendre_value(static_cast<unsigned>(n) - 1, x);
      const double dp = n * (x * p - pm1) / (x * x - 1.0);
      const double step = p / dp;
      x -= step;
      if (std::abs(step) < 1e-15) break;
    }
    const double p = legendre_value(static_cast<unsigned>(n), x);
    const double pm1 = legendre_value(static_cast<unsigned>(n) - 1, x);
    const double dp = n * (x * p - pm1) / (x * x - 1.0);
    nodes[n - 1 - i] = x;
    weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

std::vector<double> legendre_poly_coeffs(unsigned k) {
  std::vector<double> prev{1.0};  // L_0
  if (k == 0) return prev;
  std::vector<double> cur{0.0, 1.0};  // L_1
  for (unsigned j = 2; j <= k; ++j) {
    std::vector<double> next(j + 1, 0.0);
    for (std::size_t d = 0; d < cur.size(); ++d)
      next[d + 1] += (2.0 * j - 1.0) / j * cur[d];
    for (std::size_t d = 0; d < prev.size(); ++d)
      next[d] -= (j - 1.0) / j * prev[d];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

DenseMatrix generate(const TransformSpec& spec) {
  require_power_of_two(spec.n);
  const std::size_t n = spec.n;
  const bool normalized = spec.scaling == Scaling::Normalized;
  DenseMatrix m(n, n, Field::Complex);

  switch (spec.kind) {
    case TransformKind::Dft: {
      const double scale = normalized ? 1.0 / std::sqrt(static_cast<double>(n)) : 1.0;
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j) {
          const double angle = -2.0 * kPi * static_cast<double>((k * j) % n) /
                               static_cast<double>(n);
          m.at(k, j) = scale * std::polar(1.0, angle);
        }
      break;
    }
    case TransformKind::Dct: {
      m.field = Field::Real;
      const double scale = normalized ? std::sqrt(2.0 / static_cast<double>(n)) : 1.0;
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j)
          m.at(k, j) = scale * std::cos(kPi / n * (j + 0.5) * k);
      break;
    }
    case TransformKind::Dst: {
      m.field = Field::Real;
      const double scale = normalized ? std::sqrt(2.0 / static_cast<double>(n)) : 1.0;
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j)
          m.at(k, j) = scale * std::sin(kPi / n * (j + 0.5) * (k + 1));
      break;
    }
    case TransformKind::Convolution: {
      return circulant(convolution_filter(n, spec.seed));
    }
    case TransformKind::Hadamard: {
      m.field = Field::Real;
      const int levels = std::countr_zero(n);
      const double scale = std::exp2(-0.5 * levels);
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j)
          m.at(k, j) = (std::popcount(k & j) % 2 == 0) ? scale : -scale;
      break;
    }
    case TransformKind::Hartley: {
      m.field = Field::Real;
      const double scale = normalized ? 1.0 / std::sqrt(static_cast<double>(n)) : 1.0;
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j) {
          const double angle = 2.0 * kPi * static_cast<double>((k * j) % n) /
                               static_cast<double>(n);
          m.at(k, j) = scale * (std::cos(angle) + std::sin(angle));
        }
      break;
    }
    case TransformKind::Legendre: {
      m.field = Field::Real;
      if (normalized) {
        // Orthonormal discrete Legendre transform: rows are L_k sampled at
        // the Gauss nodes and scaled by sqrt(w_j (2k+1)/2).  Quadrature
        // exactness up to degree 2n-1 makes T T^t = I exactly.
        std::vector<double> nodes, weights;
        gauss_legendre_nodes(n, nodes, weights);
        for (std::size_t k = 0; k < n; ++k)
          for (std::size_t j = 0; j < n; ++j)
            m.at(k, j) = std::sqrt(weights[j] * (2.0 * k + 1.0) / 2.0) *
                         legendre_value(static_cast<unsigned>(k), nodes[j]);
      } else {
        for (std::size_t k = 0; k < n; ++k)
          for (std::size_t j = 0; j < n; ++j) {
            const double x =
                2.0 * static_cast<double>(j) / static_cast<double>(n) - 1.0;
            m.at(k, j) = legendre_value(static_cast<unsigned>(k), x);
          }
      }
      break;
    }
    case TransformKind::Randn: {
      m.field = Field::Real;
      Rng rng = Rng::derive(spec.seed, kRandnStream ^ n);
      const double variance = 1.0 / static_cast<double>(n);
      for (Cx& e : m.entries) e = Cx{rng.gaussian(1.0, variance), 0.0};
      break;
    }
  }
  return m;
}

TransformKind parse_transform(std::string_view name) {
  if (name == "dft") return TransformKind::Dft;
  if (name == "dct") return TransformKind::Dct;
  if (name == "dst") return TransformKind::Dst;
  if (name == "conv") return TransformKind::Convolution;
  if (name == "hadamard") return TransformKind::Hadamard;
  if (name == "hartley") return TransformKind::Hartley;
  if (name == "legendre") return TransformKind::Legendre;
  if (name == "randn") return TransformKind::Randn;
  throw std::invalid_argument("unknown transform: " + std::string(name));
}

std::string transform_name(TransformKind kind) {
  switch (kind) {
    case TransformKind::Dft: return "dft";
    case TransformKind::Dct: return "dct";
    case TransformKind::Dst: return "dst";
    case TransformKind::Convolution: return "conv";
    case TransformKind::Hadamard: return "hadamard";
    case TransformKind::Hartley: return "hartley";
    case TransformKind::Legendre: return "legendre";
    case TransformKind::Randn: return "randn";
  }
  return "?";
}

std::span<const TransformKind> all_transforms() {
  static const TransformKind kinds[] = {
      TransformKind::Dft,      TransformKind::Dct,     TransformKind::Dst,
      TransformKind::Convolution, TransformKind::Hadamard, TransformKind::Hartley,
      TransformKind::Legendre, TransformKind::Randn,
  };
  return kinds;
}

}  // namespace butterfly
