#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "ract/attack.hpp"
#include "ract/evaluate.hpp"
#include "ract/lander.hpp"
#include "ract/policy.hpp"
#include "ract/ppo.hpp"
#include "ract/training.hpp"

namespace py = pybind11;

namespace {

ract::Vec2 to_vec2(const std::array<double, 2>& a) { return {a[0], a[1]}; }

ract::policy::GaussianActionDist make_dist(const std::array<double, 2>& mean,
                                           const std::array<double, 2>& std) {
  return ract::policy::GaussianActionDist::from_mean_std(to_vec2(mean), to_vec2(std));
}

/// Stateful lander wrapper with one owned stream per instance.
class PyLanderEnv {
 public:
  explicit PyLanderEnv(uint64_t seed = 0) : rng_(ract::named_stream(seed, "env")) {}

  std::array<double, 8> reset() { return env_.reset(rng_).as_array(); }

  py::dict step(double main, double lateral) {
    const auto r = env_.step({main, lateral});
    py::dict out;
    out["state"] = r.next_state.as_array();
    out["reward"] = r.reward;
    out["done"] = r.done;
    out["termination"] = std::string(ract::env::termination_name(r.kind));
    return out;
  }

  bool done() const { return env_.done(); }

 private:
  ract::env::LanderEnv env_;
  ract::RngStream rng_;
};

class PyPolicy {
 public:
  explicit PyPolicy(uint64_t seed) {
    ract::RngStream init = ract::named_stream(seed, "init");
    net_ = std::make_unique<ract::policy::PolicyNet>(ract::policy::PolicyArch{}, init);
  }
  explicit PyPolicy(const std::string& checkpoint_path) {
    auto [net, manifest] = ract::policy::load_checkpoint(checkpoint_path);
    net_ = std::make_unique<ract::policy::PolicyNet>(std::move(net));
    mode_ = manifest.mode;
  }

  py::dict forward(const std::array<double, 8>& state) {
    const auto [dist, value] = net_->forward(state);
    py::dict out;
    out["mean"] = std::array<double, 2>{dist.mean[0], dist.mean[1]};
    out["std"] = std::array<double, 2>{dist.std[0], dist.std[1]};
    out["value"] = value;
    return out;
  }

  const std::string& mode() const { return mode_; }

 private:
  std::unique_ptr<ract::policy::PolicyNet> net_;
  std::string mode_ = "fresh";
};

std::string run_training_json(const std::string& config_json) {
  const auto cfg = nlohmann::json::parse(config_json).get<ract::train::TrainingRunConfig>();
  const auto record = ract::train::run_training(cfg);
  nlohmann::json out;
  out["episodes"] = record.episodes.size();
  out["updates"] = record.updates.size();
  out["final_checkpoint"] = record.final_checkpoint.string();
  out["mode"] = record.mode;
  out["wall_clock_seconds"] = record.wall_clock_seconds;
  std::vector<double> rewards;
  rewards.reserve(record.episodes.size());
  for (const auto& e : record.episodes) rewards.push_back(e.reward_normalized);
  out["rewards_normalized"] = rewards;
  return out.dump();
}

std::string evaluate_json(const std::string& scenario_json) {
  const auto scenario = nlohmann::json::parse(scenario_json).get<ract::eval::Scenario>();
  const auto report = ract::eval::evaluate(scenario);
  return ract::eval::report_to_json(report).dump();
}

}  // namespace

PYBIND11_MODULE(_ract, m) {
  m.doc() = "PPO lander training, action-space PGD attacks, adversarial training";

  m.def(
      "project",
      [](const std::array<double, 2>& v, const std::string& norm, double budget) {
        const auto p = ract::attack::project(to_vec2(v), ract::attack::norm_from_name(norm), budget);
        return std::array<double, 2>{p[0], p[1]};
      },
      py::arg("v"), py::arg("norm"), py::arg("budget"),
      "Euclidean projection onto the l1/l2 ball of the given budget");

  m.def(
      "density_gradient",
      [](const std::array<double, 2>& mean, const std::array<double, 2>& std,
         const std::array<double, 2>& a) {
        const auto g = ract::attack::density_gradient(make_dist(mean, std), to_vec2(a));
        return std::array<double, 2>{g[0], g[1]};
      },
      py::arg("mean"), py::arg("std"), py::arg("a"));

  m.def(
      "log_density",
      [](const std::array<double, 2>& mean, const std::array<double, 2>& std,
         const std::array<double, 2>& a) {
        return ract::policy::log_density(make_dist(mean, std), to_vec2(a));
      },
      py::arg("mean"), py::arg("std"), py::arg("a"));

  m.def(
      "entropy",
      [](const std::array<double, 2>& std) {
        return ract::policy::entropy(make_dist({0.0, 0.0}, std));
      },
      py::arg("std"));

  m.def(
      "pgd_attack",
      [](const std::array<double, 2>& mean, const std::array<double, 2>& std,
         const std::array<double, 2>& a_nominal, const std::string& norm, double budget,
         double step_size, double tolerance, int max_iters, uint64_t seed) {
        ract::attack::AttackConfig cfg;
        cfg.norm = ract::attack::norm_from_name(norm);
        cfg.budget = budget;
        cfg.step_size = step_size;
        cfg.tolerance = tolerance;
        cfg.max_iters = max_iters;
        ract::RngStream rng = ract::named_stream(seed, "attack");
        const auto [adv, trace] =
            ract::attack::pgd_attack(make_dist(mean, std), to_vec2(a_nominal), cfg, rng);
        py::dict out;
        out["a_adv"] = std::array<double, 2>{adv[0], adv[1]};
        out["delta"] = std::array<double, 2>{trace.final_delta[0], trace.final_delta[1]};
        out["iters"] = trace.iterates.size() - 1;
        out["converged"] = trace.converged;
        out["density_start"] = trace.densities.front();
        out["density_end"] = trace.densities.back();
        return out;
      },
      py::arg("mean"), py::arg("std"), py::arg("a_nominal"), py::arg("norm") = "l1",
      py::arg("budget") = 1.0, py::arg("step_size") = 3.0, py::arg("tolerance") = 1e-3,
      py::arg("max_iters") = 100, py::arg("seed") = 0);

  m.def(
      "compute_returns",
      [](const std::vector<double>& rewards, const std::vector<bool>& dones, double gamma,
         double bootstrap) {
        const auto flat = std::make_unique<bool[]>(dones.size());
        for (size_t i = 0; i < dones.size(); ++i) flat[i] = dones[i];
        return ract::ppo::compute_returns(rewards, std::span<const bool>(flat.get(), dones.size()),
                                          gamma, bootstrap);
      },
      py::arg("rewards"), py::arg("dones"), py::arg("gamma"), py::arg("bootstrap") = 0.0);

  m.def(
      "compute_gae",
      [](const std::vector<double>& rewards, const std::vector<double>& values,
         const std::vector<bool>& dones, double gamma, double lam, double bootstrap) {
        std::vector<ract::ppo::Transition> ts(rewards.size());
        for (size_t i = 0; i < rewards.size(); ++i) {
          ts[i].reward = rewards[i];
          ts[i].value = values[i];
          ts[i].done = dones[i];
        }
        return ract::ppo::compute_gae(ts, gamma, lam, bootstrap);
      },
      py::arg("rewards"), py::arg("values"), py::arg("dones"), py::arg("gamma"), py::arg("lam"),
      py::arg("bootstrap") = 0.0);

  m.def(
      "moving_average",
      [](const std::vector<double>& series, int window) {
        return ract::train::moving_average(series, window);
      },
      py::arg("series"), py::arg("window"));

  m.def(
      "histogram",
      [](const std::vector<double>& rewards, double bin_width, double lo, double hi) {
        return ract::eval::histogram(rewards, bin_width, lo, hi);
      },
      py::arg("rewards"), py::arg("bin_width") = 0.25, py::arg("lo") = -3.0, py::arg("hi") = 3.0);

  m.def("run_training_json", &run_training_json, py::arg("config_json"),
        "Run one training run from a resolved-config JSON string; returns a summary JSON string");
  m.def("evaluate_json", &evaluate_json, py::arg("scenario_json"),
        "Evaluate a scenario JSON string; returns the report JSON string");
  m.def("default_training_config_json", [] {
    return nlohmann::json(ract::train::TrainingRunConfig{}).dump();
  });

  py::class_<PyLanderEnv>(m, "LanderEnv")
      .def(py::init<uint64_t>(), py::arg("seed") = 0)
      .def("reset", &PyLanderEnv::reset)
      .def("step", &PyLanderEnv::step, py::arg("main"), py::arg("lateral"))
      .def_property_readonly("done", &PyLanderEnv::done);

  py::class_<PyPolicy>(m, "Policy")
      .def(py::init<uint64_t>(), py::arg("seed"))
      .def(py::init<const std::string&>(), py::arg("checkpoint_path"))
      .def("forward", &PyPolicy::forward, py::arg("state"))
      .def_property_readonly("mode", &PyPolicy::mode);
}
