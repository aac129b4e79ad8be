#pragma once

#include <cstdint>

#include "chainkb/params.hpp"

namespace chainkb {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with bias correction. Moments mirror the parameter layout; a
// coordinate that never receives a nonzero gradient never moves.
class AdamOptimizer {
 public:
  AdamOptimizer(const ParamSet& shape, AdamConfig config = {});

  // One update. Throws if layouts disagree or any gradient is non-finite
  // (the error names the offending parameter).
  void step(ParamSet& params, const ParamSet& grads);

  std::uint64_t step_count() const { return step_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  ParamSet first_moment_;
  ParamSet second_moment_;
  std::uint64_t step_ = 0;
};

}  // namespace chainkb
