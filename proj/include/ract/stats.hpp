#pragma once

#include <span>

namespace ract::stats {

double mean(std::span<const double> xs);
/// Population standard deviation (n in the denominator): a single sample
/// reports 0.
double stddev(std::span<const double> xs);
double sample_variance(std::span<const double> xs);

struct TTest {
  double t_stat = 0.0;
  double p_value = 1.0;
  bool significant = false;
};

/// Pooled-variance two-sample t-test, two-sided.
TTest pooled_t_test(std::span<const double> a, std::span<const double> b, double alpha = 0.05);

struct MannWhitney {
  double u_stat = 0.0;  // U of the first sample
  double z = 0.0;
  double p_value = 1.0;
  bool significant = false;
};

/// Mann-Whitney U with average ranks for ties, tie-corrected normal
/// approximation and continuity correction, two-sided.
MannWhitney mann_whitney_u(std::span<const double> a, std::span<const double> b,
                           double alpha = 0.05);

}  // namespace ract::stats
