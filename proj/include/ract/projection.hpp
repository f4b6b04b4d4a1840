#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "ract/vec.hpp"

namespace ract::attack {

enum class Norm { L1, L2 };

/// Euclidean projection onto the norm ball {x : ||x||_p <= budget}.
/// Vectors already inside the ball are returned bit-exactly unchanged.
/// L2 rescales along the ray; L1 uses the sort-based soft-threshold
/// (simplex projection on magnitudes, signs restored).
Vec2 project(Vec2 v, Norm norm, double budget);

/// n-dimensional variant used by the 2-d wrapper.
std::vector<double> project(std::span<const double> v, Norm norm, double budget);

const char* norm_name(Norm n);
Norm norm_from_name(std::string_view name);

}  // namespace ract::attack
