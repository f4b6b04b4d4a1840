#include "ract/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ract/io_util.hpp"

namespace ract::eval {

void to_json(nlohmann::json& j, const Scenario& s) {
  j = nlohmann::json{};
  j["agent_checkpoint"] = s.agent_checkpoint.string();
  j["attack"] = s.attack ? nlohmann::json(*s.attack) : nlohmann::json(nullptr);
  j["episodes"] = s.episodes;
  j["seed"] = s.seed;
  j["greedy"] = s.greedy;
  j["env"] = s.env;
}

void from_json(const nlohmann::json& j, Scenario& s) {
  s.agent_checkpoint = j.at("agent_checkpoint").get<std::string>();
  if (j.contains("attack") && !j.at("attack").is_null())
    s.attack = j.at("attack").get<attack::AttackConfig>();
  else
    s.attack.reset();
  s.episodes = j.at("episodes").get<int>();
  s.seed = j.at("seed").get<uint64_t>();
  s.greedy = j.value("greedy", false);
  s.env = j.at("env").get<env::LanderConfig>();
}

std::pair<std::vector<double>, std::vector<int>> histogram(std::span<const double> rewards,
                                                           double bin_width, double lo,
                                                           double hi) {
  if (!(bin_width > 0.0)) throw std::invalid_argument("histogram: bin width must be > 0");
  if (!(lo < hi)) throw std::invalid_argument("histogram: lo must be < hi");
  const int nbins = std::max(1, static_cast<int>(std::llround((hi - lo) / bin_width)));
  std::vector<double> edges(nbins + 1);
  for (int i = 0; i <= nbins; ++i) edges[i] = lo + bin_width * i;
  std::vector<int> counts(nbins, 0);
  for (double r : rewards) {
    int idx = static_cast<int>(std::floor((r - lo) / bin_width));
    idx = std::clamp(idx, 0, nbins - 1);
    ++counts[idx];
  }
  return {edges, counts};
}

EvalReport evaluate(const Scenario& scenario) {
  if (scenario.episodes < 1) throw std::invalid_argument("evaluate: episodes must be >= 1");
  if (scenario.attack) scenario.attack->validate(true);
  auto [net, manifest] = policy::load_checkpoint(scenario.agent_checkpoint);

  EvalReport report;
  report.rewards_normalized.reserve(scenario.episodes);

  for (int ep = 0; ep < scenario.episodes; ++ep) {
    RngStream env_rng = named_stream(scenario.seed, "eval-env", static_cast<uint64_t>(ep));
    RngStream policy_rng = named_stream(scenario.seed, "eval-policy", static_cast<uint64_t>(ep));
    RngStream attack_rng = named_stream(scenario.seed, "eval-attack", static_cast<uint64_t>(ep));

    env::LanderEnv lander(scenario.env);
    auto state = lander.reset(env_rng).as_array();
    double episode_reward = 0.0;
    std::string traj;
    if (scenario.trajectory_dir) traj = env::trajectory_csv_header() + "\n";

    while (true) {
      const auto [dist, value] = net.forward(state);
      Vec2 action = scenario.greedy ? dist.mean : policy::sample(dist, policy_rng);
      if (scenario.attack)
        action = attack::pgd_attack(dist, action, *scenario.attack, attack_rng).first;
      const auto result = lander.step({action[0], action[1]});
      episode_reward += result.reward;
      if (scenario.trajectory_dir)
        traj += env::trajectory_csv_row(lander.steps_taken() - 1, result.next_state,
                                        {action[0], action[1]}, result.reward, result.done) +
                "\n";
      state = result.next_state.as_array();
      if (result.done) break;
    }

    if (scenario.trajectory_dir)
      write_file(*scenario.trajectory_dir / ("ep" + std::to_string(ep) + ".csv"), traj);
    report.rewards_normalized.push_back(episode_reward / scenario.env.reward_normalization);
  }

  report.mean = stats::mean(report.rewards_normalized);
  report.stddev = stats::stddev(report.rewards_normalized);
  std::tie(report.bin_edges, report.counts) = histogram(report.rewards_normalized, 0.25, -3.0, 3.0);
  for (double r : report.rewards_normalized) {
    if (r >= kBandLandedShutdown)
      ++report.landed_and_shutdown;
    else if (r >= kBandLandedEngineOn)
      ++report.landed_engine_on;
    else
      ++report.crashed_or_lost;
  }
  return report;
}

Comparison compare(const EvalReport& a, const EvalReport& b) {
  Comparison c;
  c.mean_diff = a.mean - b.mean;
  if (a.rewards_normalized.size() >= 2 && b.rewards_normalized.size() >= 2)
    c.t = stats::pooled_t_test(a.rewards_normalized, b.rewards_normalized);
  c.mw = stats::mann_whitney_u(a.rewards_normalized, b.rewards_normalized);
  c.significant = c.mw.significant;
  return c;
}

double quantile(std::span<const double> xs, double q) {
  if (xs.empty()) throw std::invalid_argument("quantile: empty sample");
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const size_t i = static_cast<size_t>(std::floor(pos));
  if (i + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(i);
  return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

nlohmann::ordered_json report_to_json(const EvalReport& report) {
  return {{"rewards_normalized", report.rewards_normalized},
          {"mean", report.mean},
          {"std", report.stddev},
          {"histogram", {{"bin_edges", report.bin_edges}, {"counts", report.counts}}},
          {"outcomes",
           {{"landed_and_shutdown", report.landed_and_shutdown},
            {"landed_engine_on", report.landed_engine_on},
            {"crashed_or_lost", report.crashed_or_lost}}}};
}

nlohmann::ordered_json comparison_to_json(const Comparison& c) {
  return {{"mean_diff", c.mean_diff},
          {"t_stat", c.t.t_stat},
          {"t_p_value", c.t.p_value},
          {"mw_u", c.mw.u_stat},
          {"mw_p_value", c.mw.p_value},
          {"significant_at_0.05", c.significant}};
}

void write_report(const EvalReport& report, const std::filesystem::path& path) {
  write_file(path, report_to_json(report).dump(2) + "\n");
}

}  // namespace ract::eval
