#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ract/commands.hpp"
#include "ract/io_util.hpp"
#include "ract/training.hpp"

namespace fs = std::filesystem;

namespace {

int cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"ract"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return ract::cli::run_cli(static_cast<int>(argv.size()), argv.data());
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "ract_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Tiny config file so CLI-driven runs stay fast.
fs::path tiny_config_file(const fs::path& dir, uint64_t seed, int episodes) {
  ract::train::TrainingRunConfig cfg;
  cfg.seed = seed;
  cfg.episodes = episodes;
  cfg.arch = ract::policy::PolicyArch{8, 2, 16, 2};
  cfg.ppo.rollout_horizon = 128;
  cfg.ppo.minibatch_size = 32;
  cfg.ppo.epochs = 2;
  cfg.env.step_limit = 150;
  cfg.checkpoint_every = 0;
  cfg.out_dir = dir / "run";
  const auto path = dir / "tiny.json";
  ract::write_file(path, nlohmann::json(cfg).dump(2));
  return path;
}

size_t count_lines(const fs::path& p) {
  std::ifstream in(p);
  size_t n = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++n;
  return n;
}

}  // namespace

TEST_CASE("cli: attack flags with nominal mode are a usage error") {
  CHECK(cli({"train", "--mode", "nominal", "--budget", "2"}) == 2);
  CHECK(cli({"train", "--mode", "nominal", "--step-size", "1"}) == 2);
  CHECK(cli({"eval", "--agent", "x.bin", "--attack", "none", "--budget", "1"}) == 2);
}

TEST_CASE("cli: unknown flags and subcommands fail with usage errors") {
  CHECK(cli({"train", "--bogus"}) == 2);
  CHECK(cli({}) == 2);
}

TEST_CASE("cli: invalid attack parameters are usage errors") {
  CHECK(cli({"train", "--mode", "adv-l1", "--budget", "0"}) == 2);
  CHECK(cli({"train", "--mode", "adv-l1", "--tolerance", "0"}) == 2);
}

TEST_CASE("cli: train runs from a config file, then reruns bit-identically from the snapshot") {
  const auto dir = fresh_dir("train_rerun");
  const auto cfg_path = tiny_config_file(dir, 31, 3);
  CHECK(cli({"train", "--config", cfg_path.string()}) == 0);
  const auto run_dir = dir / "run";
  REQUIRE(fs::exists(run_dir / "episodes.jsonl"));

  const auto rerun_dir = dir / "rerun";
  CHECK(cli({"train", "--config", (run_dir / "config.json").string(), "--out",
             rerun_dir.string()}) == 0);
  CHECK(ract::read_file(run_dir / "episodes.jsonl") ==
        ract::read_file(rerun_dir / "episodes.jsonl"));
  CHECK(ract::read_file(run_dir / "updates.jsonl") ==
        ract::read_file(rerun_dir / "updates.jsonl"));
  CHECK(ract::read_file(run_dir / "final.bin") == ract::read_file(rerun_dir / "final.bin"));
}

TEST_CASE("cli: eval without a checkpoint exits 1; with one it writes a report") {
  CHECK(cli({"eval", "--agent", "/no/such/agent.bin"}) == 1);

  const auto dir = fresh_dir("eval_ok");
  const auto cfg_path = tiny_config_file(dir, 32, 2);
  REQUIRE(cli({"train", "--config", cfg_path.string()}) == 0);
  const auto agent = (dir / "run" / "final.bin").string();
  const auto out = (dir / "eval").string();
  CHECK(cli({"eval", "--agent", agent, "--episodes", "2", "--seed", "7", "--out", out}) == 0);
  CHECK(fs::exists(fs::path(out) / "report.json"));
  CHECK(fs::exists(fs::path(out) / "scenario.json"));
  CHECK(fs::exists(fs::path(out) / "hist.csv"));

  // Same seed, second directory: identical report bytes.
  const auto out2 = (dir / "eval2").string();
  CHECK(cli({"eval", "--agent", agent, "--episodes", "2", "--seed", "7", "--out", out2}) == 0);
  CHECK(ract::read_file(fs::path(out) / "report.json") ==
        ract::read_file(fs::path(out2) / "report.json"));
}

TEST_CASE("cli: matrix emits four reports, matrix.csv, and comparisons") {
  const auto dir = fresh_dir("matrix");
  const auto cfg_a = tiny_config_file(dir, 33, 2);
  REQUIRE(cli({"train", "--config", cfg_a.string()}) == 0);
  // Second "robust" agent: same tiny recipe, different seed/out.
  const auto run_b = dir / "run_b";
  REQUIRE(cli({"train", "--config", cfg_a.string(), "--seed", "34", "--out",
               run_b.string()}) == 0);

  const auto out = dir / "mx";
  CHECK(cli({"matrix", "--nominal-agent", (dir / "run" / "final.bin").string(),
             "--robust-agent", (run_b / "final.bin").string(), "--norm", "l1", "--episodes", "2",
             "--seed", "5", "--out", out.string()}) == 0);

  CHECK(count_lines(out / "matrix.csv") == 5);  // header + 4 scenarios
  for (const char* cell :
       {"nominal_nominal", "robust_nominal", "nominal_adversarial", "robust_adversarial"}) {
    CHECK(fs::exists(out / cell / "report.json"));
    CHECK(fs::exists(out / cell / "hist.csv"));
  }
  CHECK(fs::exists(out / "comparisons.json"));
  const auto cmp = nlohmann::json::parse(ract::read_file(out / "comparisons.json"));
  CHECK(cmp.contains("adversarial_env_robust_vs_nominal"));
}

TEST_CASE("cli: aggregate writes a curve and rejects mismatched runs") {
  const auto dir = fresh_dir("aggregate");
  const auto cfg = tiny_config_file(dir, 35, 3);
  REQUIRE(cli({"train", "--config", cfg.string()}) == 0);
  const auto run_b = dir / "run_b";
  REQUIRE(cli({"train", "--config", cfg.string(), "--seed", "36", "--out", run_b.string()}) == 0);

  const auto curve = (dir / "curve.csv").string();
  CHECK(cli({"aggregate", (dir / "run").string(), run_b.string(), "--window", "2", "--out",
             curve}) == 0);
  CHECK(count_lines(curve) == 4);  // header + 3 episodes

  const auto short_run = dir / "run_short";
  REQUIRE(cli({"train", "--config", cfg.string(), "--episodes", "2", "--out",
               short_run.string()}) == 0);
  CHECK(cli({"aggregate", (dir / "run").string(), short_run.string(), "--out", curve}) == 1);
}

TEST_CASE("cli: trajectory dumps appear behind the flag") {
  const auto dir = fresh_dir("traj");
  const auto cfg = tiny_config_file(dir, 37, 2);
  REQUIRE(cli({"train", "--config", cfg.string()}) == 0);
  const auto out = dir / "eval";
  CHECK(cli({"eval", "--agent", (dir / "run" / "final.bin").string(), "--episodes", "2", "--out",
             out.string(), "--dump-trajectories"}) == 0);
  CHECK(fs::exists(out / "trajectories" / "ep0.csv"));
  CHECK(fs::exists(out / "trajectories" / "ep1.csv"));
  std::ifstream in(out / "trajectories" / "ep0.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,x,y,vx,vy,angle,angvel,lc,rc,a_main,a_lat,reward,done");
}
