#pragma once

#include <utility>
#include <vector>

#include <json.hpp>

#include "ract/gaussian.hpp"
#include "ract/projection.hpp"
#include "ract/rng.hpp"
#include "ract/vec.hpp"

namespace ract::attack {

struct AttackConfig {
  Norm norm = Norm::L1;
  double budget = 1.0;
  double step_size = 3.0;
  double tolerance = 1e-3;  // infinity-norm saturation test on iterate deltas
  int max_iters = 100;
  bool descend_log_density = false;  // ablation: descend log p instead of p

  /// Strict validation for user-facing configs. `allow_degenerate` permits
  /// budget 0 and step size 0 (test builds exercise both).
  void validate(bool allow_degenerate = false) const;
};

void to_json(nlohmann::json& j, const AttackConfig& a);
void from_json(const nlohmann::json& j, AttackConfig& a);

struct AttackTrace {
  std::vector<Vec2> iterates;
  std::vector<double> densities;
  bool converged = false;
  Vec2 final_delta{0.0, 0.0};
};

/// Closed-form gradient of the joint Gaussian density:
/// d p(a) / d a_d = -p(a) * (a_d - mean_d) / std_d^2.
Vec2 density_gradient(const policy::GaussianActionDist& dist, Vec2 a);

/// Gradient of log p(a): -(a_d - mean_d) / std_d^2.
Vec2 log_density_gradient(const policy::GaussianActionDist& dist, Vec2 a);

/// Iterative descent on the action distribution, then one projection of
/// the total perturbation onto the budget ball. The initial iterate is a
/// fresh draw from `dist`; iteration stops once successive iterates differ
/// by less than the tolerance in the infinity norm (saturation) or at the
/// iteration cap (converged=false, best iterate kept). Returns the
/// perturbed action a_nominal + P_B(a_final - a_nominal) with its trace.
std::pair<Vec2, AttackTrace> pgd_attack(const policy::GaussianActionDist& dist, Vec2 a_nominal,
                                        const AttackConfig& cfg, RngStream& rng);

}  // namespace ract::attack
