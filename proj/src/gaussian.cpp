#include "ract/gaussian.hpp"

#include <cmath>

namespace ract::policy {

GaussianActionDist GaussianActionDist::from_mean_std(Vec2 mean, Vec2 std) {
  return {mean, std, {std::log(std[0]), std::log(std[1])}};
}

GaussianActionDist GaussianActionDist::from_mean_log_std(Vec2 mean, Vec2 log_std) {
  return {mean, {std::exp(log_std[0]), std::exp(log_std[1])}, log_std};
}

double log_density(const GaussianActionDist& dist, Vec2 a) {
  double term[2];
  for (int d = 0; d < 2; ++d) {
    const double inv_sigma = 1.0 / dist.std[d];
    const double z = (a[d] - dist.mean[d]) * inv_sigma;
    term[d] = (kNegHalfLog2Pi - dist.log_std[d]) - 0.5 * (z * z);
  }
  return term[0] + term[1];
}

double density(const GaussianActionDist& dist, Vec2 a) {
  return std::exp(log_density(dist, a));
}

double entropy(const GaussianActionDist& dist) {
  const double e0 = kHalfPlusHalfLog2Pi + dist.log_std[0];
  const double e1 = kHalfPlusHalfLog2Pi + dist.log_std[1];
  return e0 + e1;
}

Vec2 sample(const GaussianActionDist& dist, RngStream& rng) {
  const double z0 = rng.normal();
  const double z1 = rng.normal();
  return {dist.mean[0] + dist.std[0] * z0, dist.mean[1] + dist.std[1] * z1};
}

}  // namespace ract::policy
