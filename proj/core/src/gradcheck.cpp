#include "chainkb/gradcheck.hpp"

#include <cmath>
#include <stdexcept>

namespace chainkb {

GradCheckReport check_gradients(
    const std::function<LossProbe(const ParamSet&)>& loss_fn,
    const ParamSet& params, const ParamSet& analytic,
    const GradCheckConfig& config) {
  if (!params.same_layout(analytic)) {
    throw std::invalid_argument("check_gradients: parameter/gradient layout mismatch");
  }
  GradCheckReport report;
  ParamSet work = params;
  const double h = config.fd_step;
  for (std::size_t c = 0; c < work.coord_count(); ++c) {
    double& x = work.coord(c);
    const double saved = x;

    x = saved + h;
    const LossProbe plus = loss_fn(work);
    x = saved - h;
    const LossProbe minus = loss_fn(work);
    x = saved;

    if (!std::isfinite(plus.loss) || !std::isfinite(minus.loss)) {
      throw std::runtime_error("check_gradients: loss is non-finite");
    }
    if (plus.pattern != minus.pattern ||
        plus.kink_margin < config.kink_exclusion ||
        minus.kink_margin < config.kink_exclusion) {
      ++report.coords_skipped;
      continue;
    }

    const double numeric = (plus.loss - minus.loss) / (2.0 * h);
    const double a = analytic.coord(c);
    const double diff = std::fabs(a - numeric);
    double rel = 0.0;
    if (diff > config.abs_tol) {
      rel = diff / std::max(std::fabs(a), std::fabs(numeric));
    }
    ++report.coords_checked;
    if (rel > report.max_rel_error) report.max_rel_error = rel;
    if (rel > config.rel_tol) {
      ++report.coords_failed;
      if (report.failures.size() < config.max_recorded_failures) {
        const auto ref = analytic.locate(c);
        report.failures.push_back(GradCheckFailure{
            std::string(ref.name), ref.row, ref.col, a, numeric, rel});
      }
    }
  }
  return report;
}

}  // namespace chainkb
