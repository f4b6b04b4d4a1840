#include "ract/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace ract::diff {

AdamState::AdamState(size_t param_count, AdamConfig cfg)
    : cfg_(cfg), m_(param_count, 0.0), v_(param_count, 0.0) {}

void AdamState::step(ParameterVector& params, std::span<const double> grads) {
  if (grads.size() != params.size() || grads.size() != m_.size())
    throw std::invalid_argument("adam: gradient length does not match parameter count");
  for (size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i]))
      throw std::runtime_error("adam: non-finite gradient in segment '" +
                               params.segment_of_index(i) + "' (flat index " +
                               std::to_string(i) + "); update rejected");
  }

  ++step_count_;
  const double b1 = cfg_.beta1, b2 = cfg_.beta2;
  const double bias1 = 1.0 - std::pow(b1, static_cast<double>(step_count_));
  const double bias2 = 1.0 - std::pow(b2, static_cast<double>(step_count_));
  double* p = params.data();
  for (size_t i = 0; i < grads.size(); ++i) {
    const double g = grads[i];
    m_[i] = b1 * m_[i] + (1.0 - b1) * g;
    v_[i] = b2 * v_[i] + (1.0 - b2) * g * g;
    const double m_hat = m_[i] / bias1;
    const double v_hat = v_[i] / bias2;
    p[i] -= cfg_.learning_rate * m_hat / (std::sqrt(v_hat) + cfg_.epsilon);
  }

  for (size_t i = 0; i < params.size(); ++i) {
    if (!std::isfinite(p[i]))
      throw std::runtime_error("adam: non-finite parameter in segment '" +
                               params.segment_of_index(i) + "' after update");
  }
}

}  // namespace ract::diff
