#include "ract/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <stdexcept>

namespace ract::ppo {

std::vector<double> compute_returns(std::span<const double> rewards, std::span<const bool> dones,
                                    double gamma, double bootstrap_value) {
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw std::invalid_argument("compute_returns: gamma must lie in [0, 1)");
  if (rewards.size() != dones.size())
    throw std::invalid_argument("compute_returns: rewards/dones length mismatch");
  std::vector<double> returns(rewards.size());
  double carry = bootstrap_value;
  for (size_t i = rewards.size(); i-- > 0;) {
    if (dones[i]) carry = 0.0;
    carry = rewards[i] + gamma * carry;
    returns[i] = carry;
  }
  return returns;
}

std::vector<double> compute_gae(std::span<const Transition> transitions, double gamma,
                                double lambda, double bootstrap_value) {
  std::vector<double> adv(transitions.size());
  double next_value = bootstrap_value;
  double carry = 0.0;
  for (size_t i = transitions.size(); i-- > 0;) {
    const Transition& t = transitions[i];
    const double mask = t.done ? 0.0 : 1.0;
    const double delta = t.reward + gamma * mask * next_value - t.value;
    carry = delta + gamma * lambda * mask * carry;
    adv[i] = carry;
    next_value = t.value;
  }
  return adv;
}

void RolloutBuffer::clear() {
  transitions_.clear();
  returns_.clear();
  advantages_.clear();
  finalized_ = false;
}

void RolloutBuffer::finalize(double gamma, double lambda, double bootstrap_value) {
  const size_t n = transitions_.size();
  std::vector<double> rewards(n);
  const auto dones = std::make_unique<bool[]>(n);
  for (size_t i = 0; i < n; ++i) {
    rewards[i] = transitions_[i].reward;
    dones[i] = transitions_[i].done;
  }
  returns_ = compute_returns(rewards, std::span<const bool>(dones.get(), n), gamma,
                             bootstrap_value);
  advantages_ = compute_gae(transitions_, gamma, lambda, bootstrap_value);

  // Normalize to zero mean, unit variance. A single-transition buffer is
  // degenerate (zero mean would erase the example's signal); keep it raw.
  if (advantages_.size() > 1) {
    double mean = 0.0;
    for (double a : advantages_) mean += a;
    mean /= static_cast<double>(advantages_.size());
    double var = 0.0;
    for (double a : advantages_) var += (a - mean) * (a - mean);
    var /= static_cast<double>(advantages_.size());
    const double inv = 1.0 / (std::sqrt(var) + 1e-8);
    for (double& a : advantages_) a = (a - mean) * inv;
  }
  finalized_ = true;
}

PpoUpdater::PpoUpdater(policy::PolicyNet& net, PpoConfig cfg)
    : net_(net),
      cfg_(cfg),
      adam_(net.params().size(), diff::AdamConfig{.learning_rate = cfg.learning_rate}) {
  nodes_ = policy::build_policy_graph(loss_tape_, net.arch(), true);
  input_buf_.assign(net.params().size() + net.arch().state_dim + net.arch().action_dim, 0.0);
  grad_accum_.assign(net.params().size(), 0.0);
}

PpoUpdater::Evaluation PpoUpdater::eval_transition(const Transition& t) {
  const size_t p = net_.params().size();
  std::copy(t.state.begin(), t.state.end(), input_buf_.begin() + p);
  std::copy(t.action_executed.begin(), t.action_executed.end(),
            input_buf_.begin() + p + net_.arch().state_dim);
  const auto out = loss_tape_.forward(input_buf_);
  const size_t ad = net_.arch().action_dim;
  return {out[2 * ad + 1], out[ad], out[2 * ad + 2]};
}

UpdateStats PpoUpdater::update(const RolloutBuffer& buffer, RngStream& shuffle_rng) {
  if (!buffer.finalized()) throw std::logic_error("ppo: update on a non-finalized buffer");
  const auto transitions = buffer.transitions();
  const auto returns = buffer.returns();
  const auto advantages = buffer.advantages();
  const size_t n = transitions.size();
  const size_t p = net_.params().size();
  const size_t ad = net_.arch().action_dim;

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> seeds(loss_tape_.num_outputs(), 0.0);

  UpdateStats stats;
  double count = 0.0;

  for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
    for (size_t i = n; i > 1; --i) {
      const size_t j = shuffle_rng.next_u64() % i;
      std::swap(order[i - 1], order[j]);
    }
    for (size_t start = 0; start < n; start += cfg_.minibatch_size) {
      const size_t end = std::min(n, start + cfg_.minibatch_size);
      const size_t batch = end - start;

      std::copy(net_.params().values().begin(), net_.params().values().end(), input_buf_.begin());
      std::fill(grad_accum_.begin(), grad_accum_.end(), 0.0);
      double batch_loss = 0.0;

      for (size_t k = start; k < end; ++k) {
        const size_t idx = order[k];
        const Transition& t = transitions[idx];
        const auto ev = eval_transition(t);
        const double adv = advantages[idx];
        const double ret = returns[idx];

        const double ratio = std::exp(ev.log_prob - t.log_prob);
        const double clipped_ratio =
            std::clamp(ratio, 1.0 - cfg_.clip_epsilon, 1.0 + cfg_.clip_epsilon);
        const double surr = ratio * adv;
        const double surr_clipped = clipped_ratio * adv;
        const bool clipped = surr_clipped < surr;

        const double value_err = ret - ev.value;
        const double loss = -std::min(surr, surr_clipped) + cfg_.value_coef * value_err * value_err -
                            cfg_.entropy_coef * ev.entropy;
        batch_loss += loss;

        // Cotangents of the scalar loss w.r.t. the graph outputs
        // [mean..., value, sigma..., log_prob, entropy].
        seeds[ad] = -2.0 * cfg_.value_coef * value_err;
        seeds[2 * ad + 1] = clipped ? 0.0 : -adv * ratio;
        seeds[2 * ad + 2] = -cfg_.entropy_coef;
        loss_tape_.backward_weighted(seeds);
        for (size_t q = 0; q < p; ++q) grad_accum_[q] += loss_tape_.gradient(loss_tape_.input_node(q));

        stats.actor_loss += -std::min(surr, surr_clipped);
        stats.critic_loss += value_err * value_err;
        stats.entropy += ev.entropy;
        stats.approx_kl += (ratio - 1.0) - std::log(ratio);
        stats.clip_fraction += clipped ? 1.0 : 0.0;
        count += 1.0;
      }

      if (!std::isfinite(batch_loss))
        throw std::runtime_error("ppo: non-finite loss; update aborted");

      const double inv_batch = 1.0 / static_cast<double>(batch);
      for (double& g : grad_accum_) g *= inv_batch;
      double norm_sq = 0.0;
      for (double g : grad_accum_) norm_sq += g * g;
      const double norm = std::sqrt(norm_sq);
      if (norm > cfg_.max_grad_norm) {
        const double scale = cfg_.max_grad_norm / norm;
        for (double& g : grad_accum_) g *= scale;
      }
      adam_.step(net_.params(), grad_accum_);
      net_.clamp_log_std();
      net_.mark_params_dirty();
    }
  }

  stats.actor_loss /= count;
  stats.critic_loss /= count;
  stats.entropy /= count;
  stats.approx_kl /= count;
  stats.clip_fraction /= count;
  stats.kl_alarm = stats.approx_kl > cfg_.kl_alarm_threshold;
  return stats;
}

double PpoUpdater::loss_value(std::span<const Transition> batch, std::span<const double> returns,
                              std::span<const double> advantages) {
  const size_t p = net_.params().size();
  std::copy(net_.params().values().begin(), net_.params().values().end(), input_buf_.begin());
  double total = 0.0;
  for (size_t i = 0; i < batch.size(); ++i) {
    const auto ev = eval_transition(batch[i]);
    const double ratio = std::exp(ev.log_prob - batch[i].log_prob);
    const double clipped_ratio =
        std::clamp(ratio, 1.0 - cfg_.clip_epsilon, 1.0 + cfg_.clip_epsilon);
    const double value_err = returns[i] - ev.value;
    total += -std::min(ratio * advantages[i], clipped_ratio * advantages[i]) +
             cfg_.value_coef * value_err * value_err - cfg_.entropy_coef * ev.entropy;
  }
  (void)p;
  return total / static_cast<double>(batch.size());
}

std::vector<double> PpoUpdater::loss_gradient(std::span<const Transition> batch,
                                              std::span<const double> returns,
                                              std::span<const double> advantages) {
  const size_t p = net_.params().size();
  const size_t ad = net_.arch().action_dim;
  std::copy(net_.params().values().begin(), net_.params().values().end(), input_buf_.begin());
  std::vector<double> grad(p, 0.0);
  std::vector<double> seeds(loss_tape_.num_outputs(), 0.0);
  for (size_t i = 0; i < batch.size(); ++i) {
    const auto ev = eval_transition(batch[i]);
    const double ratio = std::exp(ev.log_prob - batch[i].log_prob);
    const double clipped_ratio =
        std::clamp(ratio, 1.0 - cfg_.clip_epsilon, 1.0 + cfg_.clip_epsilon);
    const bool clipped = clipped_ratio * advantages[i] < ratio * advantages[i];
    seeds[ad] = -2.0 * cfg_.value_coef * (returns[i] - ev.value);
    seeds[2 * ad + 1] = clipped ? 0.0 : -advantages[i] * ratio;
    seeds[2 * ad + 2] = -cfg_.entropy_coef;
    loss_tape_.backward_weighted(seeds);
    for (size_t q = 0; q < p; ++q) grad[q] += loss_tape_.gradient(loss_tape_.input_node(q));
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (double& g : grad) g *= inv;
  return grad;
}

}  // namespace ract::ppo
