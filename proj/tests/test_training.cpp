#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "ract/io_util.hpp"
#include "ract/training.hpp"

using namespace ract::train;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "ract_train_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TrainingRunConfig tiny_config(const fs::path& out, uint64_t seed, int episodes) {
  TrainingRunConfig cfg;
  cfg.seed = seed;
  cfg.episodes = episodes;
  cfg.arch = ract::policy::PolicyArch{8, 2, 16, 2};
  cfg.ppo.rollout_horizon = 128;
  cfg.ppo.minibatch_size = 32;
  cfg.ppo.epochs = 3;
  cfg.env.step_limit = 200;
  cfg.checkpoint_every = 0;
  cfg.out_dir = out;
  return cfg;
}

}  // namespace

TEST_CASE("moving average: identity, hand example, constants, empty") {
  CHECK(moving_average(std::vector<double>{3.0, 1.0, 4.0}, 1) ==
        std::vector<double>{3.0, 1.0, 4.0});
  CHECK(moving_average(std::vector<double>{1.0, 2.0, 3.0}, 3) ==
        std::vector<double>{1.0, 1.5, 2.0});
  CHECK(moving_average(std::vector<double>{2.5, 2.5, 2.5, 2.5}, 2) ==
        std::vector<double>{2.5, 2.5, 2.5, 2.5});
  CHECK(moving_average(std::vector<double>{}, 10).empty());
  CHECK_THROWS_AS(moving_average(std::vector<double>{1.0}, 0), std::invalid_argument);
}

TEST_CASE("multi-seed aggregate: singleton, mirrored series, length mismatch") {
  const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
  CHECK(multi_seed_aggregate({xs}, 2) == moving_average(xs, 2));

  std::vector<double> neg(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) neg[i] = -xs[i];
  for (double v : multi_seed_aggregate({xs, neg}, 3)) CHECK(v == 0.0);

  CHECK_THROWS_AS(multi_seed_aggregate({xs, {1.0, 2.0}}, 2), std::invalid_argument);
  CHECK_THROWS_AS(multi_seed_aggregate({}, 2), std::invalid_argument);
}

TEST_CASE("run_training writes the run directory layout and matching record") {
  const auto dir = fresh_dir("layout");
  auto cfg = tiny_config(dir, 5, 4);
  cfg.checkpoint_every = 2;
  const auto record = run_training(cfg);

  CHECK(record.episodes.size() == 4);
  CHECK(record.mode == "nominal");
  CHECK(fs::exists(dir / "config.json"));
  CHECK(fs::exists(dir / "episodes.jsonl"));
  CHECK(fs::exists(dir / "updates.jsonl"));
  CHECK(fs::exists(dir / "final.bin"));
  CHECK(fs::exists(dir / "final.json"));
  CHECK(fs::exists(dir / "checkpoints" / "ep2.bin"));
  CHECK(fs::exists(dir / "checkpoints" / "ep4.bin"));

  const auto rewards = read_episode_rewards(dir);
  REQUIRE(rewards.size() == 4);
  for (size_t i = 0; i < 4; ++i)
    CHECK(rewards[i] == record.episodes[i].reward_normalized);

  // The snapshot parses back to the exact same configuration.
  const auto parsed =
      nlohmann::json::parse(ract::read_file(dir / "config.json")).get<TrainingRunConfig>();
  CHECK(nlohmann::json(parsed) == nlohmann::json(cfg));
}

TEST_CASE("training is bit-deterministic for a fixed resolved config") {
  const auto dir_a = fresh_dir("det_a");
  const auto dir_b = fresh_dir("det_b");
  auto cfg_a = tiny_config(dir_a, 9, 6);
  auto cfg_b = tiny_config(dir_b, 9, 6);
  run_training(cfg_a);
  run_training(cfg_b);
  CHECK(ract::read_file(dir_a / "episodes.jsonl") == ract::read_file(dir_b / "episodes.jsonl"));
  CHECK(ract::read_file(dir_a / "updates.jsonl") == ract::read_file(dir_b / "updates.jsonl"));
  CHECK(ract::read_file(dir_a / "final.bin") == ract::read_file(dir_b / "final.bin"));
}

TEST_CASE("zero-budget adversarial training reproduces the nominal run bit for bit") {
  const auto dir_nom = fresh_dir("b0_nominal");
  const auto dir_adv = fresh_dir("b0_adv");
  auto nom = tiny_config(dir_nom, 13, 8);
  auto adv = tiny_config(dir_adv, 13, 8);
  adv.mode = "adv-l1";
  adv.attack = ract::attack::AttackConfig{};
  adv.attack->budget = 0.0;
  run_training(nom);
  run_training(adv);
  CHECK(ract::read_file(dir_nom / "episodes.jsonl") == ract::read_file(dir_adv / "episodes.jsonl"));
  CHECK(ract::read_file(dir_nom / "updates.jsonl") == ract::read_file(dir_adv / "updates.jsonl"));
  CHECK(ract::read_file(dir_nom / "final.bin") == ract::read_file(dir_adv / "final.bin"));
}

TEST_CASE("adversarial training: attack fires at every step within budget") {
  const auto dir = fresh_dir("adv_trace");
  auto cfg = tiny_config(dir, 21, 5);
  cfg.mode = "adv-l2";
  cfg.attack = ract::attack::AttackConfig{};
  cfg.attack->norm = ract::attack::Norm::L2;
  cfg.trace_attacks = true;
  const auto record = run_training(cfg);

  size_t total_steps = 0;
  for (const auto& e : record.episodes) total_steps += static_cast<size_t>(e.steps);

  std::ifstream trace(dir / "attack_trace.jsonl");
  REQUIRE(trace.good());
  size_t lines = 0;
  std::string line;
  while (std::getline(trace, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    const double d0 = j.at("delta")[0].get<double>();
    const double d1 = j.at("delta")[1].get<double>();
    CHECK(std::hypot(d0, d1) <= cfg.attack->budget + 1e-9);
    const double adv0 = j.at("a_adv")[0].get<double>();
    const double nom0 = j.at("a_nominal")[0].get<double>();
    CHECK(std::abs(adv0 - (nom0 + d0)) <= 1e-12);
    ++lines;
  }
  CHECK(lines == total_steps);
}

TEST_CASE("training rejects bad configs") {
  auto cfg = tiny_config(fresh_dir("bad"), 1, 0);
  CHECK_THROWS_AS(run_training(cfg), std::invalid_argument);
}
