#include "ract/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ract::attack {

namespace {

double l1_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Projection of |v| onto the simplex {u >= 0, sum u = budget}, signs
// restored. Sort-based threshold rule. The trailing loop nudges theta up
// until the rounded result's own l1 norm is <= budget, which makes the
// projection an exact fixed point of itself.
std::vector<double> project_l1(std::span<const double> v, double budget) {
  std::vector<double> out(v.begin(), v.end());
  if (l1_norm(out) <= budget) return out;

  std::vector<double> mags(v.size());
  for (size_t i = 0; i < v.size(); ++i) mags[i] = std::abs(v[i]);
  std::sort(mags.begin(), mags.end(), std::greater<double>());

  double running = 0.0;
  double theta = 0.0;
  for (size_t j = 0; j < mags.size(); ++j) {
    running += mags[j];
    const double candidate = (running - budget) / static_cast<double>(j + 1);
    if (mags[j] - candidate > 0.0) theta = candidate;
  }

  for (int pass = 0; pass < 32; ++pass) {
    size_t nonzero = 0;
    double norm = 0.0;
    for (size_t i = 0; i < out.size(); ++i) {
      const double mag = std::max(std::abs(v[i]) - theta, 0.0);
      out[i] = std::copysign(mag, v[i]);
      norm += mag;
      if (mag > 0.0) ++nonzero;
    }
    if (norm <= budget || nonzero == 0) break;
    double next = theta + (norm - budget) / static_cast<double>(nonzero);
    if (!(next > theta)) next = std::nextafter(theta, std::numeric_limits<double>::infinity());
    theta = next;
  }
  return out;
}

std::vector<double> project_l2(std::span<const double> v, double budget) {
  std::vector<double> out(v.begin(), v.end());
  double n2 = l2_norm(out);
  for (int pass = 0; pass < 32 && n2 > budget; ++pass) {
    const double scale = budget / n2;
    for (double& x : out) x *= scale;
    n2 = l2_norm(out);
  }
  return out;
}

}  // namespace

std::vector<double> project(std::span<const double> v, Norm norm, double budget) {
  if (budget < 0.0) throw std::invalid_argument("projection: budget must be non-negative");
  if (budget == 0.0) return std::vector<double>(v.size(), 0.0);
  return norm == Norm::L1 ? project_l1(v, budget) : project_l2(v, budget);
}

Vec2 project(Vec2 v, Norm norm, double budget) {
  auto out = project(std::span<const double>(v.begin(), v.size()), norm, budget);
  return {out[0], out[1]};
}

const char* norm_name(Norm n) { return n == Norm::L1 ? "l1" : "l2"; }

Norm norm_from_name(std::string_view name) {
  if (name == "l1" || name == "L1") return Norm::L1;
  if (name == "l2" || name == "L2") return Norm::L2;
  throw std::invalid_argument("unknown norm: " + std::string(name) + " (expected l1 or l2)");
}

}  // namespace ract::attack
