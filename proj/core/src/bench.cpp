#include "butterfly/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "butterfly/butterfly_stack.hpp"
#include "butterfly/dense.hpp"
#include "butterfly/exact.hpp"
#include "butterfly/rng.hpp"

namespace butterfly {

namespace {

using clock_type = std::chrono::steady_clock;

double now_ns() {
  return std::chrono::duration<double, std::nano>(clock_type::now().time_since_epoch())
      .count();
}

// Times fn() repeatedly, sizing the inner loop so one sample spans >= ~20 us,
// then reports per-call medians over the sample set.
template <typename Fn>
BenchRecord time_operation(const std::string& name, std::size_t n,
                           const BenchOptions& opt, Fn&& fn) {
  std::size_t iters = 1;
  for (;;) {
    const double t0 = now_ns();
    for (std::size_t i = 0; i < iters; ++i) fn();
    const double span = now_ns() - t0;
    if (span >= 20000.0 || iters >= (std::size_t{1} << 24)) break;
    iters *= 2;
  }

  std::vector<double> samples;
  samples.reserve(opt.repetitions);
  for (std::size_t s = 0; s < opt.warmups + opt.repetitions; ++s) {
    const double t0 = now_ns();
    for (std::size_t i = 0; i < iters; ++i) fn();
    const double per_call = (now_ns() - t0) / static_cast<double>(iters);
    if (s >= opt.warmups) samples.push_back(per_call);
  }
  std::sort(samples.begin(), samples.end());
  const std::size_t c = samples.size();
  const double median = samples[c / 2];
  const double iqr = samples[(3 * c) / 4] - samples[c / 4];
  return {name, n, median, iqr, c};
}

}  // namespace

double fit_loglog_slope(const std::vector<std::pair<std::size_t, double>>& points) {
  if (points.size() < 2) throw std::invalid_argument("fit_loglog_slope: need >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [n, t] : points) {
    const double x = std::log(static_cast<double>(n));
    const double y = std::log(t);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = static_cast<double>(points.size());
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

BenchResult run_bench(const BenchOptions& options) {
  BenchResult result;
  Rng rng(options.seed);

  for (std::size_t n = options.min_n; n <= options.max_n; n *= 2) {
    // pre-allocated inputs; nothing inside the timed region allocates
    const ButterflyStack stack = ButterflyStack::random(n, Field::Complex, rng);
    const ButterflyStack fft = fft_bp(n).butterfly;
    DenseMatrix dense(n, n, Field::Complex);
    for (Cx& e : dense.entries)
      e = Cx{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    std::vector<Cx> x(n), y(n);
    for (Cx& e : x) e = Cx{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};

    volatile double sink = 0.0;
    result.records.push_back(time_operation("noop", n, options, [&] {
      sink = sink + x[0].real();
    }));
    result.records.push_back(time_operation("butterfly_matvec", n, options, [&] {
      stack.fast_multiply(x, y);
      sink = sink + y[0].real();
    }));
    result.records.push_back(time_operation("exact_fft_matvec", n, options, [&] {
      fft.fast_multiply(x, y);
      sink = sink + y[0].real();
    }));
    result.records.push_back(time_operation("dense_matvec", n, options, [&] {
      dense_matvec(dense, x, y);
      sink = sink + y[0].real();
    }));
  }

  for (const char* op : {"butterfly_matvec", "exact_fft_matvec", "dense_matvec"}) {
    std::vector<std::pair<std::size_t, double>> pts;
    for (const BenchRecord& r : result.records)
      if (r.operation == op && r.n >= 256) pts.emplace_back(r.n, r.median_ns);
    if (pts.size() >= 2)
      result.slopes.push_back({op, fit_loglog_slope(pts), pts.size()});
  }
  return result;
}

}  // namespace butterfly
