#include "ract/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

namespace ract::stats {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("stats: mean of empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double stddev(std::span<const double> xs) {
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size()));
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size() - 1);
}

TTest pooled_t_test(std::span<const double> a, std::span<const double> b, double alpha) {
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("t-test: need >= 2 samples each");
  const double pooled =
      ((na - 1.0) * sample_variance(a) + (nb - 1.0) * sample_variance(b)) / (na + nb - 2.0);
  const double se = std::sqrt(pooled * (1.0 / na + 1.0 / nb));
  TTest r;
  if (se == 0.0) {
    r.t_stat = mean(a) == mean(b) ? 0.0 : std::numeric_limits<double>::infinity();
    r.p_value = r.t_stat == 0.0 ? 1.0 : 0.0;
  } else {
    r.t_stat = (mean(a) - mean(b)) / se;
    boost::math::students_t dist(na + nb - 2.0);
    r.p_value = 2.0 * boost::math::cdf(dist, -std::abs(r.t_stat));
  }
  r.significant = r.p_value < alpha;
  return r;
}

MannWhitney mann_whitney_u(std::span<const double> a, std::span<const double> b, double alpha) {
  const size_t na = a.size(), nb = b.size();
  if (na == 0 || nb == 0) throw std::invalid_argument("mann-whitney: empty sample");
  struct Tagged {
    double v;
    bool from_a;
  };
  std::vector<Tagged> all;
  all.reserve(na + nb);
  for (double x : a) all.push_back({x, true});
  for (double x : b) all.push_back({x, false});
  std::sort(all.begin(), all.end(), [](const Tagged& l, const Tagged& r) { return l.v < r.v; });

  const size_t n = all.size();
  std::vector<double> ranks(n);
  double tie_term = 0.0;
  for (size_t i = 0; i < n;) {
    size_t j = i;
    while (j < n && all[j].v == all[i].v) ++j;
    const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (size_t k = i; k < j; ++k) ranks[k] = avg_rank;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }

  double rank_sum_a = 0.0;
  for (size_t i = 0; i < n; ++i)
    if (all[i].from_a) rank_sum_a += ranks[i];

  MannWhitney r;
  const double dna = static_cast<double>(na), dnb = static_cast<double>(nb), dn = static_cast<double>(n);
  r.u_stat = rank_sum_a - dna * (dna + 1.0) / 2.0;
  const double mu = dna * dnb / 2.0;
  const double sigma_sq = dna * dnb / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
  if (sigma_sq <= 0.0) {
    r.z = 0.0;
    r.p_value = 1.0;
  } else {
    const double diff = r.u_stat - mu;
    const double cc = diff > 0.0 ? -0.5 : (diff < 0.0 ? 0.5 : 0.0);
    r.z = (diff + cc) / std::sqrt(sigma_sq);
    r.p_value = std::erfc(std::abs(r.z) / std::sqrt(2.0));
  }
  r.significant = r.p_value < alpha;
  return r;
}

}  // namespace ract::stats
