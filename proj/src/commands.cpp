#include "ract/commands.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ract/evaluate.hpp"
#include "ract/io_util.hpp"
#include "ract/training.hpp"

namespace ract::cli {

namespace {

namespace fs = std::filesystem;

/// Flag-combination problems: exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Preset {
  int episodes;
  int seeds;
  int eval_episodes;
};

Preset preset_by_name(const std::string& name) {
  if (name == "paper") return {15000, 7, 1000};
  if (name == "desk") return {3000, 3, 50};
  throw UsageError("unknown preset: " + name);
}

size_t thread_cap(size_t jobs) {
  size_t cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ROBUST_ACT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) cap = static_cast<size_t>(v);
  }
  return std::min(cap, jobs);
}

void run_fanned_out(std::vector<train::TrainingRunConfig> runs) {
  std::atomic<size_t> next{0};
  std::vector<std::string> errors(runs.size());
  auto worker = [&] {
    for (size_t i = next.fetch_add(1); i < runs.size(); i = next.fetch_add(1)) {
      try {
        const auto record = train::run_training(runs[i]);
        std::string line = "run seed=" + std::to_string(runs[i].seed) + " mode=" + runs[i].mode +
                           " episodes=" + std::to_string(runs[i].episodes) +
                           " wall_clock_s=" + format_double(record.wall_clock_seconds) + "\n";
        std::cout << line;
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const size_t n_threads = thread_cap(runs.size());
  std::vector<std::thread> pool;
  for (size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  for (const auto& err : errors)
    if (!err.empty()) throw std::runtime_error(err);
}

struct TrainArgs {
  std::string mode = "nominal";
  int episodes = -1;
  uint64_t seed = 0;
  std::string out = "runs/run0";
  double budget = -1.0;
  double step_size = -1.0;
  double tolerance = -1.0;
  std::string preset;
  std::string config_file;
  int seeds = -1;
  bool trace_attacks = false;
  bool alt_likelihood = false;
  bool seed_given = false;
  bool mode_given = false;
  bool out_given = false;
};

int do_train(const TrainArgs& args) {
  train::TrainingRunConfig cfg;
  int fan_out = 1;

  if (!args.preset.empty()) {
    const Preset p = preset_by_name(args.preset);
    cfg.episodes = p.episodes;
    fan_out = p.seeds;
    std::cout << "preset " << args.preset << ": episodes=" << p.episodes << " seeds=" << p.seeds
              << " eval_episodes=" << p.eval_episodes << "\n";
  }
  if (!args.config_file.empty()) {
    cfg = nlohmann::json::parse(read_file(args.config_file)).get<train::TrainingRunConfig>();
  }

  if (args.mode_given || args.config_file.empty()) cfg.mode = args.mode;
  if (cfg.mode != "nominal" && cfg.mode != "adv-l1" && cfg.mode != "adv-l2")
    throw UsageError("unknown mode: " + cfg.mode);

  const bool attack_flags_given = args.budget >= 0.0 || args.step_size >= 0.0 || args.tolerance >= 0.0;
  if (cfg.mode == "nominal") {
    if (attack_flags_given)
      throw UsageError("attack flags (--budget/--step-size/--tolerance) require --mode adv-l1|adv-l2");
    cfg.attack.reset();
  } else {
    attack::AttackConfig a = cfg.attack.value_or(attack::AttackConfig{});
    a.norm = cfg.mode == "adv-l1" ? attack::Norm::L1 : attack::Norm::L2;
    if (args.budget >= 0.0) a.budget = args.budget;
    if (args.step_size >= 0.0) a.step_size = args.step_size;
    if (args.tolerance >= 0.0) a.tolerance = args.tolerance;
    try {
      a.validate(false);
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
    cfg.attack = a;
  }

  if (args.episodes > 0) cfg.episodes = args.episodes;
  if (args.seed_given || args.config_file.empty()) cfg.seed = args.seed;
  if (args.seeds > 0) fan_out = args.seeds;
  if (args.trace_attacks) cfg.trace_attacks = true;
  if (args.alt_likelihood) cfg.likelihood_nominal_action = true;

  const fs::path out_base = (args.out_given || args.config_file.empty() || cfg.out_dir.empty())
                                ? fs::path(args.out)
                                : cfg.out_dir;
  std::vector<train::TrainingRunConfig> runs;
  for (int i = 0; i < fan_out; ++i) {
    train::TrainingRunConfig run = cfg;
    run.seed = cfg.seed + static_cast<uint64_t>(i);
    run.out_dir = fan_out == 1 ? out_base : out_base / ("seed" + std::to_string(run.seed));
    runs.push_back(std::move(run));
  }
  run_fanned_out(std::move(runs));
  return 0;
}

std::optional<attack::AttackConfig> attack_from_flags(const std::string& attack_name,
                                                      double budget, double step_size,
                                                      double tolerance) {
  if (attack_name == "none") {
    if (budget >= 0.0 || step_size >= 0.0 || tolerance >= 0.0)
      throw UsageError("attack flags (--budget/--step-size/--tolerance) require --attack l1|l2");
    return std::nullopt;
  }
  attack::AttackConfig a;
  a.norm = attack::norm_from_name(attack_name);
  if (budget >= 0.0) a.budget = budget;
  if (step_size >= 0.0) a.step_size = step_size;
  if (tolerance >= 0.0) a.tolerance = tolerance;
  try {
    a.validate(false);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  return a;
}

void write_histogram_csv(const eval::EvalReport& report, const fs::path& path) {
  std::string csv = "bin_lo,bin_hi,count\n";
  for (size_t i = 0; i < report.counts.size(); ++i) {
    csv += format_double(report.bin_edges[i]) + "," + format_double(report.bin_edges[i + 1]) +
           "," + std::to_string(report.counts[i]) + "\n";
  }
  write_file(path, csv);
}

eval::EvalReport run_scenario(const eval::Scenario& scenario, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  write_file(out_dir / "scenario.json", nlohmann::json(scenario).dump(2) + "\n");
  const auto report = eval::evaluate(scenario);
  eval::write_report(report, out_dir / "report.json");
  write_histogram_csv(report, out_dir / "hist.csv");
  return report;
}

struct EvalArgs {
  std::string agent;
  std::string attack_name = "none";
  int episodes = -1;
  uint64_t seed = 0;
  std::string out = "eval_out";
  double budget = -1.0, step_size = -1.0, tolerance = -1.0;
  std::string preset;
  bool greedy = false;
  bool dump_trajectories = false;
};

int do_eval(const EvalArgs& args) {
  const auto attack_cfg =
      attack_from_flags(args.attack_name, args.budget, args.step_size, args.tolerance);
  if (!fs::exists(args.agent)) {
    std::cerr << "checkpoint not found: " << args.agent << "\n";
    return 1;
  }
  eval::Scenario scenario;
  scenario.agent_checkpoint = args.agent;
  scenario.attack = attack_cfg;
  scenario.episodes = args.episodes > 0
                          ? args.episodes
                          : (!args.preset.empty() ? preset_by_name(args.preset).eval_episodes : 50);
  scenario.seed = args.seed;
  scenario.greedy = args.greedy;
  if (args.dump_trajectories) {
    scenario.trajectory_dir = fs::path(args.out) / "trajectories";
    fs::create_directories(*scenario.trajectory_dir);
  }

  const auto report = run_scenario(scenario, args.out);
  std::cout << "agent=" << args.agent << " attack=" << args.attack_name
            << " episodes=" << scenario.episodes << " mean=" << format_double(report.mean)
            << " std=" << format_double(report.stddev) << "\n";
  return 0;
}

struct MatrixArgs {
  std::string nominal_agent;
  std::string robust_agent;
  std::string norm = "l1";
  int episodes = 50;
  uint64_t seed = 0;
  std::string out = "matrix_out";
  double budget = -1.0, step_size = -1.0, tolerance = -1.0;
  bool greedy = false;
};

int do_matrix(const MatrixArgs& args) {
  for (const auto& path : {args.nominal_agent, args.robust_agent}) {
    if (!fs::exists(path)) {
      std::cerr << "checkpoint not found: " << path << "\n";
      return 1;
    }
  }
  const auto attack_cfg = attack_from_flags(args.norm, args.budget, args.step_size, args.tolerance);
  const fs::path out_base = args.out;
  fs::create_directories(out_base);

  struct Cell {
    const char* agent;
    const char* environment;
    std::string checkpoint;
    bool attacked;
  };
  const std::vector<Cell> cells = {{"nominal", "nominal", args.nominal_agent, false},
                                   {"robust", "nominal", args.robust_agent, false},
                                   {"nominal", "adversarial", args.nominal_agent, true},
                                   {"robust", "adversarial", args.robust_agent, true}};

  std::vector<eval::EvalReport> reports;
  std::string csv = "agent,environment,norm,mean,std,n\n";
  for (const auto& cell : cells) {
    eval::Scenario scenario;
    scenario.agent_checkpoint = cell.checkpoint;
    scenario.attack = cell.attacked ? attack_cfg : std::nullopt;
    scenario.episodes = args.episodes;
    scenario.seed = args.seed;
    scenario.greedy = args.greedy;
    const auto report = run_scenario(
        scenario, out_base / (std::string(cell.agent) + "_" + cell.environment));
    csv += std::string(cell.agent) + "," + cell.environment + "," + args.norm + "," +
           format_double(report.mean) + "," + format_double(report.stddev) + "," +
           std::to_string(report.rewards_normalized.size()) + "\n";
    std::cout << cell.agent << "/" << cell.environment << ": mean=" << format_double(report.mean)
              << " std=" << format_double(report.stddev) << "\n";
    reports.push_back(report);
  }
  write_file(out_base / "matrix.csv", csv);

  nlohmann::json comparisons;
  comparisons["nominal_env_robust_vs_nominal"] =
      eval::comparison_to_json(eval::compare(reports[1], reports[0]));
  comparisons["adversarial_env_robust_vs_nominal"] =
      eval::comparison_to_json(eval::compare(reports[3], reports[2]));
  write_file(out_base / "comparisons.json", comparisons.dump(2) + "\n");
  return 0;
}

struct AggregateArgs {
  std::vector<std::string> run_dirs;
  int window = 100;
  std::string out = "curve.csv";
};

int do_aggregate(const AggregateArgs& args) {
  std::vector<std::vector<double>> series;
  for (const auto& dir : args.run_dirs) series.push_back(train::read_episode_rewards(dir));
  const size_t n = series.front().size();
  for (size_t s = 1; s < series.size(); ++s) {
    if (series[s].size() != n) {
      std::cerr << "aggregate: episode count mismatch: " << args.run_dirs[s] << " has "
                << series[s].size() << ", expected " << n << "\n";
      return 1;
    }
  }
  std::vector<double> mean(n, 0.0);
  for (const auto& s : series)
    for (size_t i = 0; i < n; ++i) mean[i] += s[i];
  for (double& m : mean) m /= static_cast<double>(series.size());
  const auto ma = train::moving_average(mean, args.window);

  std::string csv = "episode,mean_reward,moving_average\n";
  for (size_t i = 0; i < n; ++i)
    csv += std::to_string(i + 1) + "," + format_double(mean[i]) + "," + format_double(ma[i]) + "\n";
  write_file(args.out, csv);
  std::cout << "aggregated " << series.size() << " runs over " << n << " episodes -> " << args.out
            << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"ract: PPO lander training, action-space attacks, adversarial training, evaluation"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train an agent (nominal or adversarial)");
  auto* mode_opt = train_cmd->add_option("--mode", train_args.mode, "nominal | adv-l1 | adv-l2")
                       ->check(CLI::IsMember({"nominal", "adv-l1", "adv-l2"}));
  train_cmd->add_option("--episodes", train_args.episodes, "Episode count");
  auto* seed_opt = train_cmd->add_option("--seed", train_args.seed, "Master seed");
  auto* out_opt = train_cmd->add_option("--out", train_args.out, "Output run directory");
  train_cmd->add_option("--budget", train_args.budget, "Attack budget B");
  train_cmd->add_option("--step-size", train_args.step_size, "Attack step size alpha");
  train_cmd->add_option("--tolerance", train_args.tolerance, "Attack convergence tolerance");
  train_cmd->add_option("--preset", train_args.preset, "paper | desk")
      ->check(CLI::IsMember({"paper", "desk"}));
  train_cmd->add_option("--config", train_args.config_file, "Resolved config JSON (snapshot rerun)");
  train_cmd->add_option("--seeds", train_args.seeds, "Fan out over this many consecutive seeds");
  train_cmd->add_flag("--trace-attacks", train_args.trace_attacks, "Write attack_trace.jsonl");
  train_cmd->add_flag("--likelihood-nominal-action", train_args.alt_likelihood,
                      "Store the nominal action's log-prob instead of the executed one");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint");
  eval_cmd->add_option("--agent", eval_args.agent, "Checkpoint .bin path")->required();
  eval_cmd->add_option("--attack", eval_args.attack_name, "none | l1 | l2")
      ->check(CLI::IsMember({"none", "l1", "l2"}));
  eval_cmd->add_option("--episodes", eval_args.episodes, "Evaluation episode count");
  eval_cmd->add_option("--seed", eval_args.seed, "Scenario seed");
  eval_cmd->add_option("--out", eval_args.out, "Output directory");
  eval_cmd->add_option("--budget", eval_args.budget, "Attack budget B");
  eval_cmd->add_option("--step-size", eval_args.step_size, "Attack step size alpha");
  eval_cmd->add_option("--tolerance", eval_args.tolerance, "Attack convergence tolerance");
  eval_cmd->add_option("--preset", eval_args.preset, "paper | desk (episode-count default)")
      ->check(CLI::IsMember({"paper", "desk"}));
  eval_cmd->add_flag("--greedy", eval_args.greedy, "Act with the distribution mean");
  eval_cmd->add_flag("--dump-trajectories", eval_args.dump_trajectories,
                     "Write per-episode trajectory CSVs");

  MatrixArgs matrix_args;
  auto* matrix_cmd = app.add_subcommand("matrix", "Run the 2x2 agent/environment matrix");
  matrix_cmd->add_option("--nominal-agent", matrix_args.nominal_agent, "Nominal checkpoint")
      ->required();
  matrix_cmd->add_option("--robust-agent", matrix_args.robust_agent, "Robust checkpoint")
      ->required();
  matrix_cmd->add_option("--norm", matrix_args.norm, "l1 | l2")
      ->check(CLI::IsMember({"l1", "l2"}));
  matrix_cmd->add_option("--episodes", matrix_args.episodes, "Episodes per scenario");
  matrix_cmd->add_option("--seed", matrix_args.seed, "Scenario seed");
  matrix_cmd->add_option("--out", matrix_args.out, "Output directory");
  matrix_cmd->add_option("--budget", matrix_args.budget, "Attack budget B");
  matrix_cmd->add_option("--step-size", matrix_args.step_size, "Attack step size alpha");
  matrix_cmd->add_option("--tolerance", matrix_args.tolerance, "Attack convergence tolerance");
  matrix_cmd->add_flag("--greedy", matrix_args.greedy, "Act with the distribution mean");

  AggregateArgs agg_args;
  auto* agg_cmd = app.add_subcommand("aggregate", "Aggregate training curves across runs");
  agg_cmd->add_option("run_dirs", agg_args.run_dirs, "Run directories")->required();
  agg_cmd->add_option("--window", agg_args.window, "Moving-average window");
  agg_cmd->add_option("--out", agg_args.out, "Output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  train_args.seed_given = seed_opt->count() > 0;
  train_args.mode_given = mode_opt->count() > 0;
  train_args.out_given = out_opt->count() > 0;

  try {
    if (train_cmd->parsed()) return do_train(train_args);
    if (eval_cmd->parsed()) return do_eval(eval_args);
    if (matrix_cmd->parsed()) return do_matrix(matrix_args);
    if (agg_cmd->parsed()) return do_aggregate(agg_args);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace ract::cli
