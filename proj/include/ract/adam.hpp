#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ract/param_vector.hpp"

namespace ract::diff {

struct AdamConfig {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam with bias correction. Moments start at zero; `step` updates the
/// parameter vector in place and rejects non-finite gradients before
/// touching anything, naming the offending segment.
class AdamState {
 public:
  explicit AdamState(size_t param_count, AdamConfig cfg = {});

  void step(ParameterVector& params, std::span<const double> grads);

  uint64_t step_count() const { return step_count_; }
  const AdamConfig& config() const { return cfg_; }
  std::span<const double> first_moment() const { return m_; }
  std::span<const double> second_moment() const { return v_; }

 private:
  AdamConfig cfg_;
  std::vector<double> m_, v_;
  uint64_t step_count_ = 0;
};

}  // namespace ract::diff
