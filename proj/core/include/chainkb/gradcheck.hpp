#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "chainkb/params.hpp"

namespace chainkb {

// One forward evaluation, plus enough information to tell whether the point
// sits near a non-differentiable spot. `kink_margin` is the smallest |a|
// over all ReLU pre-activations encountered (infinity when none), and
// `pattern` fingerprints the discrete decisions of the evaluation (ReLU
// signs, max/top-k membership). A coordinate whose two probe points disagree
// on the pattern crossed a kink and is excluded from the comparison.
struct LossProbe {
  double loss = 0.0;
  double kink_margin = std::numeric_limits<double>::infinity();
  std::uint64_t pattern = 0;
};

struct GradCheckConfig {
  double fd_step = 1e-5;
  double rel_tol = 1e-4;
  // Differences below this are treated as matching regardless of magnitude;
  // central differences carry ~1e-11 of roundoff noise on O(1) losses.
  double abs_tol = 1e-8;
  double kink_exclusion = 1e-7;
  std::size_t max_recorded_failures = 16;
};

struct GradCheckFailure {
  std::string param;
  std::size_t row = 0;
  std::size_t col = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_error = 0.0;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t coords_checked = 0;
  std::size_t coords_skipped = 0;
  std::size_t coords_failed = 0;
  std::vector<GradCheckFailure> failures;
  bool ok() const { return coords_failed == 0; }
};

// Compares `analytic` against central finite differences of `loss_fn` at
// `params`, coordinate by coordinate. Throws if the loss is non-finite.
GradCheckReport check_gradients(
    const std::function<LossProbe(const ParamSet&)>& loss_fn,
    const ParamSet& params, const ParamSet& analytic,
    const GradCheckConfig& config = {});

}  // namespace chainkb
