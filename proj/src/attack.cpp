#include "ract/attack.hpp"

#include <cmath>
#include <stdexcept>

namespace ract::attack {

void AttackConfig::validate(bool allow_degenerate) const {
  if (allow_degenerate ? !(budget >= 0.0) : !(budget > 0.0))
    throw std::invalid_argument("attack: budget must be > 0");
  if (allow_degenerate ? !(step_size >= 0.0) : !(step_size > 0.0))
    throw std::invalid_argument("attack: step size must be > 0");
  if (!(tolerance > 0.0)) throw std::invalid_argument("attack: tolerance must be > 0");
  if (max_iters <= 0) throw std::invalid_argument("attack: iteration cap must be > 0");
}

void to_json(nlohmann::json& j, const AttackConfig& a) {
  j = nlohmann::json{{"norm", norm_name(a.norm)},
                     {"budget", a.budget},
                     {"step_size", a.step_size},
                     {"tolerance", a.tolerance},
                     {"max_iters", a.max_iters},
                     {"descend_log_density", a.descend_log_density}};
}

void from_json(const nlohmann::json& j, AttackConfig& a) {
  a.norm = norm_from_name(j.at("norm").get<std::string>());
  a.budget = j.at("budget").get<double>();
  a.step_size = j.at("step_size").get<double>();
  a.tolerance = j.at("tolerance").get<double>();
  a.max_iters = j.at("max_iters").get<int>();
  a.descend_log_density = j.value("descend_log_density", false);
}

Vec2 density_gradient(const policy::GaussianActionDist& dist, Vec2 a) {
  const double p = density(dist, a);
  Vec2 g;
  for (int d = 0; d < 2; ++d)
    g[d] = -p * (a[d] - dist.mean[d]) / (dist.std[d] * dist.std[d]);
  return g;
}

Vec2 log_density_gradient(const policy::GaussianActionDist& dist, Vec2 a) {
  Vec2 g;
  for (int d = 0; d < 2; ++d)
    g[d] = -(a[d] - dist.mean[d]) / (dist.std[d] * dist.std[d]);
  return g;
}

std::pair<Vec2, AttackTrace> pgd_attack(const policy::GaussianActionDist& dist, Vec2 a_nominal,
                                        const AttackConfig& cfg, RngStream& rng) {
  cfg.validate(true);

  AttackTrace trace;
  Vec2 a = sample(dist, rng);
  trace.iterates.push_back(a);
  trace.densities.push_back(density(dist, a));

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    const Vec2 g = cfg.descend_log_density ? log_density_gradient(dist, a)
                                           : density_gradient(dist, a);
    const Vec2 next = a - cfg.step_size * g;
    trace.iterates.push_back(next);
    trace.densities.push_back(density(dist, next));
    const bool saturated = norm_inf(next - a) < cfg.tolerance;
    a = next;
    if (saturated) {
      trace.converged = true;
      break;
    }
  }

  trace.final_delta = project(a - a_nominal, cfg.norm, cfg.budget);
  const Vec2 adversarial = (trace.final_delta[0] == 0.0 && trace.final_delta[1] == 0.0)
                               ? a_nominal
                               : a_nominal + trace.final_delta;
  return {adversarial, trace};
}

}  // namespace ract::attack
