#include "ract/training.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ract/io_util.hpp"

namespace ract::train {

void to_json(nlohmann::json& j, const TrainingRunConfig& cfg) {
  j = nlohmann::json{};
  j["seed"] = cfg.seed;
  j["episodes"] = cfg.episodes;
  j["mode"] = cfg.mode;
  j["attack"] = cfg.attack ? nlohmann::json(*cfg.attack) : nlohmann::json(nullptr);
  j["env"] = cfg.env;
  j["arch"] = cfg.arch;
  j["ppo"] = cfg.ppo;
  j["checkpoint_every"] = cfg.checkpoint_every;
  j["out_dir"] = cfg.out_dir.string();
  j["trace_attacks"] = cfg.trace_attacks;
  j["likelihood_nominal_action"] = cfg.likelihood_nominal_action;
}

void from_json(const nlohmann::json& j, TrainingRunConfig& cfg) {
  cfg.seed = j.at("seed").get<uint64_t>();
  cfg.episodes = j.at("episodes").get<int>();
  cfg.mode = j.at("mode").get<std::string>();
  if (j.contains("attack") && !j.at("attack").is_null())
    cfg.attack = j.at("attack").get<attack::AttackConfig>();
  else
    cfg.attack.reset();
  cfg.env = j.at("env").get<env::LanderConfig>();
  cfg.arch = j.at("arch").get<policy::PolicyArch>();
  cfg.ppo = j.at("ppo").get<ppo::PpoConfig>();
  cfg.checkpoint_every = j.at("checkpoint_every").get<int>();
  cfg.out_dir = j.at("out_dir").get<std::string>();
  cfg.trace_attacks = j.value("trace_attacks", false);
  cfg.likelihood_nominal_action = j.value("likelihood_nominal_action", false);
}

std::vector<double> moving_average(std::span<const double> series, int window) {
  if (window < 1) throw std::invalid_argument("moving_average: window must be >= 1");
  std::vector<double> out(series.size());
  double running = 0.0;
  for (size_t i = 0; i < series.size(); ++i) {
    running += series[i];
    if (i >= static_cast<size_t>(window)) running -= series[i - window];
    const size_t denom = std::min(i + 1, static_cast<size_t>(window));
    out[i] = running / static_cast<double>(denom);
  }
  return out;
}

std::vector<double> multi_seed_aggregate(const std::vector<std::vector<double>>& series,
                                         int window) {
  if (series.empty()) throw std::invalid_argument("aggregate: no series given");
  const size_t n = series.front().size();
  for (const auto& s : series)
    if (s.size() != n)
      throw std::invalid_argument("aggregate: series lengths differ (" + std::to_string(n) +
                                  " vs " + std::to_string(s.size()) + ")");
  std::vector<double> mean(n, 0.0);
  for (const auto& s : series)
    for (size_t i = 0; i < n; ++i) mean[i] += s[i];
  const double inv = 1.0 / static_cast<double>(series.size());
  for (double& m : mean) m *= inv;
  return moving_average(mean, window);
}

std::vector<double> read_episode_rewards(const std::filesystem::path& run_dir) {
  std::ifstream in(run_dir / "episodes.jsonl");
  if (!in) throw std::runtime_error("cannot read " + (run_dir / "episodes.jsonl").string());
  std::vector<double> rewards;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rewards.push_back(nlohmann::json::parse(line).at("reward_normalized").get<double>());
  }
  return rewards;
}

TrainingRunRecord run_training(const TrainingRunConfig& cfg) {
  if (cfg.episodes < 1) throw std::invalid_argument("training: episodes must be >= 1");
  if (cfg.attack) cfg.attack->validate(true);

  const auto t_start = std::chrono::steady_clock::now();
  std::filesystem::create_directories(cfg.out_dir);
  std::filesystem::create_directories(cfg.out_dir / "checkpoints");

  write_file(cfg.out_dir / "config.json", nlohmann::json(cfg).dump(2) + "\n");

  std::ofstream episodes_out(cfg.out_dir / "episodes.jsonl", std::ios::trunc);
  std::ofstream updates_out(cfg.out_dir / "updates.jsonl", std::ios::trunc);
  std::ofstream trace_out;
  if (cfg.trace_attacks) trace_out.open(cfg.out_dir / "attack_trace.jsonl", std::ios::trunc);
  if (!episodes_out || !updates_out)
    throw std::runtime_error("training: cannot write run files in " + cfg.out_dir.string());

  RngStream init_rng = named_stream(cfg.seed, "init");
  RngStream env_rng = named_stream(cfg.seed, "env");
  RngStream policy_rng = named_stream(cfg.seed, "policy-sampling");
  RngStream attack_rng = named_stream(cfg.seed, "attack");
  RngStream shuffle_rng = named_stream(cfg.seed, "minibatch-shuffle");

  policy::PolicyNet net(cfg.arch, init_rng);
  ppo::PpoConfig ppo_cfg = cfg.ppo;
  ppo::PpoUpdater updater(net, ppo_cfg);
  env::LanderEnv lander(cfg.env);
  ppo::RolloutBuffer buffer;

  TrainingRunRecord record;
  record.mode = cfg.mode;
  std::vector<double> recent_raw;  // trailing window for update records

  auto checkpoint = [&](const std::filesystem::path& path, uint64_t episodes_done) {
    policy::CheckpointManifest manifest{cfg.arch, cfg.seed, episodes_done, cfg.mode};
    policy::save_checkpoint(net, manifest, path);
  };

  int update_idx = 0;
  int episodes_done = 0;
  int global_step = 0;

  auto run_update = [&](bool episode_done, const std::array<double, 8>& next_state) {
    double bootstrap = 0.0;
    if (!episode_done) bootstrap = net.forward(next_state).second;
    buffer.finalize(ppo_cfg.gamma, ppo_cfg.gae_lambda, bootstrap);
    ppo::UpdateStats stats;
    try {
      stats = updater.update(buffer, shuffle_rng);
    } catch (const std::exception& e) {
      checkpoint(cfg.out_dir / "final.bin", static_cast<uint64_t>(episodes_done));
      throw std::runtime_error(std::string("training aborted at update ") +
                               std::to_string(update_idx) + ": " + e.what() +
                               " (last good checkpoint written to final.bin)");
    }
    buffer.clear();
    ++update_idx;

    double mean_raw = 0.0;
    if (!recent_raw.empty()) {
      for (double r : recent_raw) mean_raw += r;
      mean_raw /= static_cast<double>(recent_raw.size());
    }
    UpdateRecord u{update_idx,
                   episodes_done,
                   mean_raw,
                   mean_raw / cfg.env.reward_normalization,
                   stats.actor_loss,
                   stats.critic_loss,
                   stats.entropy,
                   stats.clip_fraction,
                   stats.approx_kl,
                   stats.kl_alarm};
    record.updates.push_back(u);
    nlohmann::ordered_json j{{"update_idx", u.update_idx},
                             {"episodes_done", u.episodes_done},
                             {"mean_episode_reward_raw", u.mean_episode_reward_raw},
                             {"mean_episode_reward_normalized", u.mean_episode_reward_normalized},
                             {"actor_loss", u.actor_loss},
                             {"critic_loss", u.critic_loss},
                             {"entropy", u.entropy},
                             {"clip_frac", u.clip_frac},
                             {"approx_kl", u.approx_kl},
                             {"kl_alarm", u.kl_alarm}};
    updates_out << j.dump() << '\n';
  };

  for (int episode = 1; episode <= cfg.episodes; ++episode) {
    auto state = lander.reset(env_rng).as_array();
    double episode_reward = 0.0;
    int episode_steps = 0;
    env::Termination termination = env::Termination::none;

    while (true) {
      const auto [dist, value] = net.forward(state);
      const Vec2 nominal = policy::sample(dist, policy_rng);

      Vec2 executed = nominal;
      if (cfg.attack) {
        auto [adversarial, trace] = attack::pgd_attack(dist, nominal, *cfg.attack, attack_rng);
        executed = adversarial;
        if (cfg.trace_attacks) {
          nlohmann::ordered_json tj{
              {"t", global_step},
              {"a_nominal", {nominal[0], nominal[1]}},
              {"a_adv", {executed[0], executed[1]}},
              {"delta", {trace.final_delta[0], trace.final_delta[1]}},
              {"iters", trace.iterates.size() - 1},
              {"converged", trace.converged},
              {"density_start", trace.densities.front()},
              {"density_end", trace.densities.back()}};
          trace_out << tj.dump() << '\n';
        }
      }

      const Vec2 likelihood_action = cfg.likelihood_nominal_action ? nominal : executed;
      const double log_prob = policy::log_density(dist, likelihood_action);

      const auto result = lander.step({executed[0], executed[1]});
      episode_reward += result.reward;
      ++episode_steps;
      ++global_step;

      buffer.push(ppo::Transition{state, likelihood_action, log_prob, result.reward, value,
                                  result.done});
      state = result.next_state.as_array();

      if (static_cast<int>(buffer.size()) >= ppo_cfg.rollout_horizon)
        run_update(result.done, state);

      if (result.done) {
        termination = result.kind;
        break;
      }
    }

    ++episodes_done;
    recent_raw.push_back(episode_reward);
    if (recent_raw.size() > 100) recent_raw.erase(recent_raw.begin());

    EpisodeRecord er{episode, episode_steps, episode_reward,
                     episode_reward / cfg.env.reward_normalization,
                     env::termination_name(termination)};
    record.episodes.push_back(er);
    nlohmann::ordered_json ej{{"episode", er.episode},
                              {"steps", er.steps},
                              {"reward_raw", er.reward_raw},
                              {"reward_normalized", er.reward_normalized},
                              {"termination", er.termination}};
    episodes_out << ej.dump() << '\n';

    if (cfg.checkpoint_every > 0 && episode % cfg.checkpoint_every == 0)
      checkpoint(cfg.out_dir / "checkpoints" / ("ep" + std::to_string(episode) + ".bin"),
                 static_cast<uint64_t>(episode));
  }

  checkpoint(cfg.out_dir / "final.bin", static_cast<uint64_t>(cfg.episodes));
  record.final_checkpoint = cfg.out_dir / "final.bin";
  record.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return record;
}

}  // namespace ract::train
