#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "butterfly/model.hpp"

namespace butterfly {

struct GradCheckCase {
  ArchSpec arch;
  Field field = Field::Complex;
  std::size_t n = 0;
  bool tie_logits = false;
  double entropy_weight = 0.0;
  std::uint64_t seed = 0;
  double max_rel_error = 0.0;  // worst coordinate, hybrid denominator
};

struct GradCheckReport {
  std::vector<GradCheckCase> cases;
  double worst = 0.0;
  double step = 0.0;
  bool passed(double threshold = 1e-6) const { return worst < threshold; }
};

struct GradCheckOptions {
  std::size_t cases = 20;
  double step = 1e-5;  // central finite-difference step
  std::uint64_t seed = 17;
};

// Analytic gradients vs central finite differences of the objective on
// random (arch, field, N) instances with random dense targets.  Per
// coordinate the error is |analytic - fd| / max(|analytic|, |fd|, 1), so
// tiny gradients are judged absolutely and large ones relatively.
GradCheckReport run_gradcheck(const GradCheckOptions& options = {});

}  // namespace butterfly
