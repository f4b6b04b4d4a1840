#pragma once

#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "ract/policy.hpp"
#include "ract/rng.hpp"
#include "ract/vec.hpp"

namespace ract::ppo {

/// One environment step as consumed by the PPO update. `action_executed`
/// is the action actually sent to the environment (the perturbed action
/// under adversarial training); `log_prob` is its log density under the
/// collection-time policy, stored bit-exactly.
struct Transition {
  std::array<double, 8> state{};
  Vec2 action_executed{};
  double log_prob = 0.0;
  double reward = 0.0;
  double value = 0.0;
  bool done = false;
};

struct PpoConfig {
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip_epsilon = 0.2;
  double value_coef = 0.5;
  double entropy_coef = 0.001;
  double learning_rate = 3e-4;
  int rollout_horizon = 2048;
  int epochs = 10;
  int minibatch_size = 64;
  double max_grad_norm = 0.5;
  double kl_alarm_threshold = 0.2;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(PpoConfig, gamma, gae_lambda, clip_epsilon, value_coef,
                                   entropy_coef, learning_rate, rollout_horizon, epochs,
                                   minibatch_size, max_grad_norm, kl_alarm_threshold)

/// Discounted return recursion G_t = r_t + gamma * G_{t+1}, reset across
/// done boundaries; the tail is bootstrapped with `bootstrap_value` when
/// the buffer ends mid-episode. Throws on gamma outside [0, 1).
std::vector<double> compute_returns(std::span<const double> rewards, std::span<const bool> dones,
                                    double gamma, double bootstrap_value);

/// GAE(gamma, lambda) over the buffer, reset at done boundaries;
/// `bootstrap_value` stands in for the value after the last transition.
std::vector<double> compute_gae(std::span<const Transition> transitions, double gamma,
                                double lambda, double bootstrap_value);

/// Rollout storage; finalize() fills returns and normalized advantages.
class RolloutBuffer {
 public:
  void push(const Transition& t) { transitions_.push_back(t); }
  void clear();
  size_t size() const { return transitions_.size(); }
  bool finalized() const { return finalized_; }

  void finalize(double gamma, double lambda, double bootstrap_value);

  std::span<const Transition> transitions() const { return transitions_; }
  std::span<const double> returns() const { return returns_; }
  std::span<const double> advantages() const { return advantages_; }

 private:
  std::vector<Transition> transitions_;
  std::vector<double> returns_;
  std::vector<double> advantages_;
  bool finalized_ = false;
};

struct UpdateStats {
  double actor_loss = 0.0;
  double critic_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  bool kl_alarm = false;
};

/// Clipped-surrogate PPO update: E epochs of shuffled minibatches, loss
/// -min(ratio*adv, clip(ratio)*adv) + c_v*(return-value)^2 - c_e*entropy,
/// one Adam step per minibatch. Throws std::runtime_error on a non-finite
/// loss, leaving `net` untouched by the offending minibatch.
class PpoUpdater {
 public:
  explicit PpoUpdater(policy::PolicyNet& net, PpoConfig cfg = {});

  UpdateStats update(const RolloutBuffer& buffer, RngStream& shuffle_rng);

  const PpoConfig& config() const { return cfg_; }

  /// Gradient of the mean minibatch loss w.r.t. all parameters, exposed
  /// for gradient checks.
  std::vector<double> loss_gradient(std::span<const Transition> batch,
                                    std::span<const double> returns,
                                    std::span<const double> advantages);
  /// Mean minibatch loss at the current parameters (no mutation).
  double loss_value(std::span<const Transition> batch, std::span<const double> returns,
                    std::span<const double> advantages);

 private:
  struct Evaluation {
    double log_prob, value, entropy;
  };
  Evaluation eval_transition(const Transition& t);

  policy::PolicyNet& net_;
  PpoConfig cfg_;
  diff::Tape loss_tape_;
  policy::NetGraphNodes nodes_;
  diff::AdamState adam_;
  std::vector<double> input_buf_;
  std::vector<double> grad_accum_;
};

}  // namespace ract::ppo
