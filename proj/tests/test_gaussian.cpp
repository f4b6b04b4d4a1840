#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "ract/gaussian.hpp"
#include "ract/rng.hpp"

using ract::RngStream;
using ract::Vec2;
using ract::policy::GaussianActionDist;

TEST_CASE("log density at the mode with unit std is -log(2*pi)") {
  const auto d = GaussianActionDist::from_mean_std({0.4, -0.2}, {1.0, 1.0});
  CHECK(ract::policy::log_density(d, d.mean) ==
        doctest::Approx(-std::log(2.0 * M_PI)).epsilon(1e-12));
}

TEST_CASE("density is maximized at the mean") {
  const auto d = GaussianActionDist::from_mean_std({0.1, 0.7}, {0.5, 1.5});
  const double at_mode = ract::policy::density(d, d.mean);
  RngStream rng(3);
  for (int i = 0; i < 200; ++i) {
    const Vec2 a{d.mean[0] + rng.normal(), d.mean[1] + rng.normal()};
    CHECK(ract::policy::density(d, a) <= at_mode);
  }
}

TEST_CASE("density integrates to 1 (2-d quadrature) within 1e-3") {
  const auto d = GaussianActionDist::from_mean_std({0.3, -0.6}, {0.8, 1.3});
  const double integral = oracles::quadrature_2d(
      [&](double x, double y) { return ract::policy::density(d, {x, y}); },
      d.mean[0] - 8.0 * d.std[0], d.mean[0] + 8.0 * d.std[0], d.mean[1] - 8.0 * d.std[1],
      d.mean[1] + 8.0 * d.std[1], 500);
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("entropy closed form and monotonicity") {
  const auto unit = GaussianActionDist::from_mean_std({0.0, 0.0}, {1.0, 1.0});
  CHECK(ract::policy::entropy(unit) == doctest::Approx(1.0 + std::log(2.0 * M_PI)).epsilon(1e-12));
  double prev = -1e300;
  for (double s : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const auto d = GaussianActionDist::from_mean_std({0.0, 0.0}, {s, 1.0});
    const double h = ract::policy::entropy(d);
    CHECK(h > prev);
    prev = h;
  }
}

TEST_CASE("entropy matches Monte-Carlo negative mean log density within 1e-2") {
  const auto d = GaussianActionDist::from_mean_std({0.2, -0.4}, {0.6, 1.1});
  RngStream rng(99);
  double acc = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) acc += ract::policy::log_density(d, ract::policy::sample(d, rng));
  CHECK(-acc / n == doctest::Approx(ract::policy::entropy(d)).epsilon(1e-2));
}

TEST_CASE("sample mean converges to the distribution mean") {
  const auto d = GaussianActionDist::from_mean_std({0.3, -0.8}, {0.5, 2.0});
  RngStream rng(421);
  const int n = 100000;
  Vec2 acc{0.0, 0.0};
  for (int i = 0; i < n; ++i) {
    const Vec2 a = ract::policy::sample(d, rng);
    acc[0] += a[0];
    acc[1] += a[1];
  }
  for (int dim = 0; dim < 2; ++dim) {
    const double tol = 3.0 * d.std[dim] / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(acc[dim] / n - d.mean[dim]) < tol);
  }
}

TEST_CASE("sampling is reproducible from a fixed stream") {
  const auto d = GaussianActionDist::from_mean_std({0.0, 0.0}, {1.0, 1.0});
  RngStream a(7), b(7);
  for (int i = 0; i < 10; ++i) {
    const Vec2 x = ract::policy::sample(d, a);
    const Vec2 y = ract::policy::sample(d, b);
    CHECK(x[0] == y[0]);
    CHECK(x[1] == y[1]);
  }
}

TEST_CASE("degenerate variance: samples hug the mean") {
  const double s = std::exp(-5.0);
  const auto d = GaussianActionDist::from_mean_std({0.25, -0.5}, {s, s});
  RngStream rng(5);
  int outliers = 0;
  for (int i = 0; i < 20000; ++i) {
    const Vec2 a = ract::policy::sample(d, rng);
    if (std::abs(a[0] - d.mean[0]) > 5.0 * s || std::abs(a[1] - d.mean[1]) > 5.0 * s) ++outliers;
  }
  CHECK(outliers <= 2);  // ~1.1e-6 two-sided tail rate per component
}
