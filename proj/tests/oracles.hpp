#pragma once

// Test-only oracles, kept independent of the implementation paths they
// check: finite differences, brute-force return/GAE recursions, grid and
// closed-form projection references, quadrature.

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "ract/vec.hpp"

namespace oracles {

/// |a - b| <= tol * max(1, |a|, |b|): relative error with an absolute
/// floor so near-zero quantities do not explode the ratio.
inline bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

/// Central finite differences of f at x, step h per coordinate.
inline std::vector<double> finite_diff(const std::function<double(std::span<const double>)>& f,
                                       std::vector<double> x, double h = 1e-5) {
  std::vector<double> g(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + h;
    const double fp = f(x);
    x[i] = orig - h;
    const double fm = f(x);
    x[i] = orig;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

/// Discounted return by the nested (Horner) recursion evaluated from
/// scratch for every t, so each element reproduces the implementation's
/// float-operation order exactly.
inline std::vector<double> brute_force_returns(std::span<const double> rewards,
                                               std::span<const bool> dones, double gamma,
                                               double bootstrap) {
  const size_t n = rewards.size();
  std::vector<double> out(n);
  for (size_t t = 0; t < n; ++t) {
    size_t end = t;
    while (end < n && !dones[end]) ++end;  // end = index of terminal step, or n
    double carry = end == n ? bootstrap : 0.0;
    const size_t last = std::min(end, n - 1);
    for (size_t k = last + 1; k-- > t;) carry = rewards[k] + gamma * carry;
    out[t] = carry;
  }
  return out;
}

/// O(T^2) GAE by the definition sum_l (gamma*lambda)^l * delta_{t+l},
/// stopping at episode boundaries.
inline std::vector<double> brute_force_gae(std::span<const double> rewards,
                                           std::span<const double> values,
                                           std::span<const bool> dones, double gamma,
                                           double lambda, double bootstrap) {
  const size_t n = rewards.size();
  std::vector<double> delta(n);
  for (size_t t = 0; t < n; ++t) {
    const double next_v = dones[t] ? 0.0 : (t + 1 < n ? values[t + 1] : bootstrap);
    delta[t] = rewards[t] + gamma * next_v - values[t];
  }
  std::vector<double> adv(n, 0.0);
  for (size_t t = 0; t < n; ++t) {
    double w = 1.0;
    for (size_t l = t; l < n; ++l) {
      adv[t] += w * delta[l];
      if (dones[l]) break;
      w *= gamma * lambda;
    }
  }
  return adv;
}

/// Exact Euclidean projection onto the 2-d l1 ball by case analysis
/// (KKT): fold into the positive quadrant, project onto the simplex edge,
/// clamp to a vertex if a coordinate goes negative.
inline ract::Vec2 qp_l1_projection(ract::Vec2 v, double budget) {
  const double u0 = std::abs(v[0]), u1 = std::abs(v[1]);
  if (u0 + u1 <= budget) return v;
  double w0, w1;
  const double t = (u0 + u1 - budget) / 2.0;
  w0 = u0 - t;
  w1 = u1 - t;
  if (w0 < 0.0) {
    w0 = 0.0;
    w1 = budget;
  } else if (w1 < 0.0) {
    w0 = budget;
    w1 = 0.0;
  }
  return {std::copysign(w0, v[0]), std::copysign(w1, v[1])};
}

/// Grid search over the l1-ball boundary (the projection of an exterior
/// point always lands there) plus the interior fixed point.
inline ract::Vec2 grid_l1_projection(ract::Vec2 v, double budget, int points_per_edge = 20000) {
  if (std::abs(v[0]) + std::abs(v[1]) <= budget) return v;
  const ract::Vec2 corners[5] = {
      {budget, 0.0}, {0.0, budget}, {-budget, 0.0}, {0.0, -budget}, {budget, 0.0}};
  ract::Vec2 best{0.0, 0.0};
  double best_d = std::numeric_limits<double>::infinity();
  for (int e = 0; e < 4; ++e) {
    for (int i = 0; i <= points_per_edge; ++i) {
      const double t = static_cast<double>(i) / points_per_edge;
      const ract::Vec2 x = {corners[e][0] + t * (corners[e + 1][0] - corners[e][0]),
                            corners[e][1] + t * (corners[e + 1][1] - corners[e][1])};
      const double d = (x[0] - v[0]) * (x[0] - v[0]) + (x[1] - v[1]) * (x[1] - v[1]);
      if (d < best_d) {
        best_d = d;
        best = x;
      }
    }
  }
  return best;
}

/// Trapezoid quadrature of a 2-d function over [lo0,hi0] x [lo1,hi1].
inline double quadrature_2d(const std::function<double(double, double)>& f, double lo0, double hi0,
                            double lo1, double hi1, int n = 400) {
  const double h0 = (hi0 - lo0) / n, h1 = (hi1 - lo1) / n;
  double total = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w0 = (i == 0 || i == n) ? 0.5 : 1.0;
    for (int j = 0; j <= n; ++j) {
      const double w1 = (j == 0 || j == n) ? 0.5 : 1.0;
      total += w0 * w1 * f(lo0 + i * h0, lo1 + j * h1);
    }
  }
  return total * h0 * h1;
}

}  // namespace oracles
