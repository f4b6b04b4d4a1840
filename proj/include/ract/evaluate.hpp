#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ract/attack.hpp"
#include "ract/lander.hpp"
#include "ract/policy.hpp"
#include "ract/stats.hpp"

namespace ract::eval {

struct Scenario {
  std::filesystem::path agent_checkpoint;
  std::optional<attack::AttackConfig> attack;
  int episodes = 50;
  uint64_t seed = 0;
  bool greedy = false;  // default stochastic, mirroring training-time sampling
  env::LanderConfig env;
  std::optional<std::filesystem::path> trajectory_dir;  // per-episode CSV dumps
};

void to_json(nlohmann::json& j, const Scenario& s);
void from_json(const nlohmann::json& j, Scenario& s);

/// Normalized-reward outcome bands.
inline constexpr double kBandLandedShutdown = 2.5;
inline constexpr double kBandLandedEngineOn = 1.0;

struct EvalReport {
  std::vector<double> rewards_normalized;
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<double> bin_edges;
  std::vector<int> counts;
  int landed_and_shutdown = 0;
  int landed_engine_on = 0;
  int crashed_or_lost = 0;
};

/// Fixed-width bins over [lo, hi]; underflow/overflow fold into the end
/// bins, so counts always sum to the sample count.
std::pair<std::vector<double>, std::vector<int>> histogram(std::span<const double> rewards,
                                                           double bin_width, double lo, double hi);

/// Runs the scenario's episodes (per-episode rng streams derived from the
/// scenario seed by index) and aggregates the report.
EvalReport evaluate(const Scenario& scenario);

struct Comparison {
  double mean_diff = 0.0;
  stats::TTest t;
  stats::MannWhitney mw;
  bool significant = false;  // Mann-Whitney at the 0.05 level
};

Comparison compare(const EvalReport& a, const EvalReport& b);

nlohmann::ordered_json report_to_json(const EvalReport& report);
nlohmann::ordered_json comparison_to_json(const Comparison& c);
void write_report(const EvalReport& report, const std::filesystem::path& path);

/// 10th-percentile style quantile (linear interpolation) used by the
/// distribution-shift checks.
double quantile(std::span<const double> xs, double q);

}  // namespace ract::eval
