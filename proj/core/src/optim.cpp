#include "chainkb/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace chainkb {

AdamOptimizer::AdamOptimizer(const ParamSet& shape, AdamConfig config)
    : config_(config),
      first_moment_(shape.zeros_like()),
      second_moment_(shape.zeros_like()) {}

void AdamOptimizer::step(ParamSet& params, const ParamSet& grads) {
  if (!params.same_layout(grads) || !params.same_layout(first_moment_)) {
    throw std::invalid_argument("adam: parameter/gradient layout mismatch");
  }
  for (std::size_t e = 0; e < grads.entry_count(); ++e) {
    if (!grads.entry(e).value.all_finite()) {
      throw std::runtime_error("adam: non-finite gradient for parameter '" +
                               grads.entry(e).name + "'");
    }
  }
  ++step_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double m_corr = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double v_corr = 1.0 - std::pow(b2, static_cast<double>(step_));
  for (std::size_t e = 0; e < params.entry_count(); ++e) {
    auto& p = params.entry(e).value.data();
    const auto& g = grads.entry(e).value.data();
    auto& m = first_moment_.entry(e).value.data();
    auto& v = second_moment_.entry(e).value.data();
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      const double m_hat = m[i] / m_corr;
      const double v_hat = v[i] / v_corr;
      p[i] -= config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
  }
}

}  // namespace chainkb
