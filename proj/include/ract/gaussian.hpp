#pragma once

#include "ract/rng.hpp"
#include "ract/vec.hpp"

namespace ract::policy {

/// Diagonal Gaussian over the 2-dim action space.
///
/// log_std is carried alongside std so that closed-form log densities use
/// the same operand bits (and the same operation order) as the tape-built
/// loss graph; stored log probabilities then match the graph exactly.
struct GaussianActionDist {
  Vec2 mean{0.0, 0.0};
  Vec2 std{1.0, 1.0};
  Vec2 log_std{0.0, 0.0};

  static GaussianActionDist from_mean_std(Vec2 mean, Vec2 std);
  static GaussianActionDist from_mean_log_std(Vec2 mean, Vec2 log_std);
};

inline constexpr double kNegHalfLog2Pi = -0.91893853320467274178;  // -0.5*log(2*pi)
inline constexpr double kHalfPlusHalfLog2Pi = 1.4189385332046727418;  // 0.5 + 0.5*log(2*pi)

/// Sum over dimensions of the diagonal-Gaussian log density. Canonical
/// operation order: z = (a - mean) * (1/std); term = (kNegHalfLog2Pi -
/// log_std) - 0.5*z*z; result = term0 + term1.
double log_density(const GaussianActionDist& dist, Vec2 a);

/// Joint density exp(log_density).
double density(const GaussianActionDist& dist, Vec2 a);

/// Analytic entropy: sum_d (0.5 + 0.5*log(2*pi) + log_std_d).
double entropy(const GaussianActionDist& dist);

/// a = mean + std ⊙ z with z drawn from the stream. Not clamped; range
/// handling belongs to the environment.
Vec2 sample(const GaussianActionDist& dist, RngStream& rng);

}  // namespace ract::policy
