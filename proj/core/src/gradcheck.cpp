#include "butterfly/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "butterfly/dense.hpp"
#include "butterfly/rng.hpp"

namespace butterfly {

namespace {

DenseMatrix random_target(std::size_t n, Field field, Rng& rng) {
  DenseMatrix t(n, n, field);
  for (Cx& e : t.entries) {
    const double re = rng.gaussian(0.0, 1.0);
    const double im = field == Field::Complex ? rng.gaussian(0.0, 1.0) : 0.0;
    e = Cx{re, im};
  }
  return t;
}

}  // namespace

GradCheckReport run_gradcheck(const GradCheckOptions& options) {
  GradCheckReport report;
  report.step = options.step;

  const std::size_t sizes[] = {4, 8, 16};
  for (std::size_t c = 0; c < options.cases; ++c) {
    GradCheckCase gc;
    gc.arch = (c % 2 == 0) ? ArchSpec::bp() : ArchSpec::bpbp();
    if (c % 5 == 3) {
      // DCT/DST-style architecture: fixed extra input permutation plus
      // real-part output.
      gc.arch = ArchSpec::bp();
      gc.arch.extra_input_perm = true;
      gc.arch.post_real_part = true;
    }
    if (c % 7 == 5) gc.arch.r = 2;
    gc.field = (c % 4 < 2) ? Field::Complex : Field::Real;
    gc.n = sizes[c % 3];
    gc.tie_logits = (c % 3 == 1);
    gc.entropy_weight = (c % 6 == 4) ? 0.01 : 0.0;
    gc.seed = options.seed * 1000 + c;

    Rng rng(gc.seed);
    BPProductModel model =
        BPProductModel::random(gc.n, gc.arch, gc.field, gc.tie_logits, rng);
    Rng trng = Rng::derive(gc.seed, 1);
    const DenseMatrix target = random_target(gc.n, gc.field, trng);

    std::vector<double> analytic =
        gradients(model, target, gc.entropy_weight, /*train_logits=*/true);
    std::vector<double> params;
    model.get_params(params);

    const double h = options.step;
    for (std::size_t i = 0; i < params.size(); ++i) {
      std::vector<double> p = params;
      p[i] = params[i] + h;
      model.set_params(p);
      const double up = objective(model, target, gc.entropy_weight);
      p[i] = params[i] - h;
      model.set_params(p);
      const double dn = objective(model, target, gc.entropy_weight);
      const double fd = (up - dn) / (2.0 * h);
      const double denom = std::max({std::abs(analytic[i]), std::abs(fd), 1.0});
      gc.max_rel_error = std::max(gc.max_rel_error, std::abs(analytic[i] - fd) / denom);
    }
    model.set_params(params);

    report.worst = std::max(report.worst, gc.max_rel_error);
    report.cases.push_back(gc);
  }
  return report;
}

}  // namespace butterfly
