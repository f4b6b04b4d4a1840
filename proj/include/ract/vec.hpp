#pragma once

#include <cmath>
#include <cstddef>

namespace ract {

/// 2-component action / perturbation vector.
struct Vec2 {
  double data[2]{0.0, 0.0};

  double& operator[](size_t i) { return data[i]; }
  double operator[](size_t i) const { return data[i]; }
  double* begin() { return data; }
  double* end() { return data + 2; }
  const double* begin() const { return data; }
  const double* end() const { return data + 2; }
  constexpr size_t size() const { return 2; }

  bool operator==(const Vec2&) const = default;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a[0] + b[0], a[1] + b[1]}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a[0] - b[0], a[1] - b[1]}; }
  friend Vec2 operator*(double s, Vec2 v) { return {s * v[0], s * v[1]}; }
};

inline double norm1(Vec2 v) { return std::abs(v[0]) + std::abs(v[1]); }
inline double norm2(Vec2 v) { return std::hypot(v[0], v[1]); }
inline double norm_inf(Vec2 v) { return std::max(std::abs(v[0]), std::abs(v[1])); }

}  // namespace ract
