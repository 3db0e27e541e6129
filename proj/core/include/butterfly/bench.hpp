#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace butterfly {

struct BenchRecord {
  std::string operation;  // butterfly_matvec | dense_matvec | exact_fft_matvec | noop
  std::size_t n = 0;
  double median_ns = 0.0;
  double iqr_ns = 0.0;
  std::size_t repetitions = 0;
};

struct BenchOptions {
  std::size_t min_n = 16;
  std::size_t max_n = 8192;
  std::size_t repetitions = 31;  // timed samples per (op, n)
  std::size_t warmups = 5;
  std::uint64_t seed = 11;
};

struct SlopeFit {
  std::string operation;
  double slope = 0.0;   // d log(time) / d log(n) over n in [256, max_n]
  std::size_t points = 0;
};

struct BenchResult {
  std::vector<BenchRecord> records;
  std::vector<SlopeFit> slopes;
};

// Single-threaded timing of pre-allocated matvec kernels.  Each sample times
// an inner loop sized to run at least ~20 us and is normalized per call;
// median and interquartile range are taken over `repetitions` samples after
// `warmups` discarded ones.  A per-n "noop" record calibrates loop overhead.
BenchResult run_bench(const BenchOptions& options = {});

// Least-squares slope of log(median_ns) against log(n).
double fit_loglog_slope(const std::vector<std::pair<std::size_t, double>>& points);

}  // namespace butterfly
