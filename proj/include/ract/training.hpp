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
#include "ract/ppo.hpp"

namespace ract::train {

struct TrainingRunConfig {
  uint64_t seed = 0;
  int episodes = 3000;
  std::string mode = "nominal";  // nominal | adv-l1 | adv-l2
  std::optional<attack::AttackConfig> attack;
  env::LanderConfig env;
  policy::PolicyArch arch;
  ppo::PpoConfig ppo;
  int checkpoint_every = 500;
  std::filesystem::path out_dir;
  bool trace_attacks = false;
  // Alternative likelihood convention: optimize the nominal action's log
  // probability while still stepping with the perturbed action.
  bool likelihood_nominal_action = false;
};

void to_json(nlohmann::json& j, const TrainingRunConfig& cfg);
void from_json(const nlohmann::json& j, TrainingRunConfig& cfg);

struct EpisodeRecord {
  int episode = 0;
  int steps = 0;
  double reward_raw = 0.0;
  double reward_normalized = 0.0;
  std::string termination;
};

struct UpdateRecord {
  int update_idx = 0;
  int episodes_done = 0;
  double mean_episode_reward_raw = 0.0;
  double mean_episode_reward_normalized = 0.0;
  double actor_loss = 0.0;
  double critic_loss = 0.0;
  double entropy = 0.0;
  double clip_frac = 0.0;
  double approx_kl = 0.0;
  bool kl_alarm = false;
};

struct TrainingRunRecord {
  std::vector<EpisodeRecord> episodes;
  std::vector<UpdateRecord> updates;
  double wall_clock_seconds = 0.0;
  std::filesystem::path final_checkpoint;
  std::string mode;
};

/// Runs one training run end to end, writing the run directory layout:
/// config.json (resolved snapshot, written before any work), episodes.jsonl,
/// updates.jsonl, checkpoints/ep{N}.bin(+.json), final.bin(+.json), and
/// attack_trace.jsonl when tracing is enabled.
///
/// Every nominal action is perturbed by the attack before execution when an
/// attack config is present; the executed action and its log probability
/// enter the rollout buffer.
TrainingRunRecord run_training(const TrainingRunConfig& cfg);

/// Trailing-window mean; the first window-1 entries average the available
/// prefix. Empty input gives empty output; window must be >= 1.
std::vector<double> moving_average(std::span<const double> series, int window);

/// Elementwise mean across same-length per-seed series, then moving_average.
std::vector<double> multi_seed_aggregate(const std::vector<std::vector<double>>& series,
                                         int window);

/// Reads the reward_normalized column of a run directory's episodes.jsonl.
std::vector<double> read_episode_rewards(const std::filesystem::path& run_dir);

}  // namespace ract::train
