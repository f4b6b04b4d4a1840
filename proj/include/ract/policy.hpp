#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ract/adam.hpp"
#include "ract/gaussian.hpp"
#include "ract/param_vector.hpp"
#include "ract/rng.hpp"
#include "ract/tape.hpp"
#include "ract/vec.hpp"

namespace ract::policy {

struct PolicyArch {
  int state_dim = 8;
  int action_dim = 2;
  int trunk_width = 64;
  int trunk_layers = 2;

  bool operator==(const PolicyArch&) const = default;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(PolicyArch, state_dim, action_dim, trunk_width, trunk_layers)

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;

/// Node bookkeeping for a policy network laid out on a tape. Inputs are
/// declared as [params (flat order), state, (loss graphs: action)].
struct NetGraphNodes {
  std::vector<diff::NodeId> state_inputs;
  std::vector<diff::NodeId> action_inputs;  // empty for forward-only graphs
  std::vector<diff::NodeId> mean_nodes;
  std::vector<diff::NodeId> sigma_nodes;
  diff::NodeId value_node = 0;
  diff::NodeId log_prob_node = 0;  // loss graphs only
  diff::NodeId entropy_node = 0;   // loss graphs only
  size_t param_count = 0;
};

/// Shared-trunk Gaussian actor-critic: tanh trunk, tanh-squashed mean head,
/// linear value head, state-independent log-std parameters.
///
/// All evaluation goes through one tape built per instance, so rollout-time
/// and update-time computations share operation order bit for bit.
class PolicyNet {
 public:
  PolicyNet(PolicyArch arch, RngStream& init_rng);
  PolicyNet(PolicyArch arch, diff::ParameterVector params);

  /// Distribution and value for one state. Throws std::invalid_argument on
  /// non-finite state components.
  std::pair<GaussianActionDist, double> forward(const std::array<double, 8>& state) const;

  const PolicyArch& arch() const { return arch_; }
  diff::ParameterVector& params() { return params_; }
  const diff::ParameterVector& params() const { return params_; }

  /// Invalidate the cached parameter image after mutating params().
  void mark_params_dirty() { params_dirty_ = true; }

  /// Projects log_std back into [kLogStdMin, kLogStdMax]; call after every
  /// optimizer step.
  void clamp_log_std();

  /// Builds the parameter layout for an architecture (all zeros).
  static diff::ParameterVector make_params(const PolicyArch& arch);

 private:
  PolicyArch arch_;
  diff::ParameterVector params_;
  mutable diff::Tape tape_;
  NetGraphNodes nodes_;
  mutable std::vector<double> input_buf_;
  mutable bool params_dirty_ = true;
};

/// Appends the network to `tape`: declares param inputs (flat order) and
/// state inputs, then mean/sigma/value nodes. With `with_loss_outputs`,
/// also declares action inputs and builds log-prob and entropy nodes.
/// Outputs marked in order: mean..., value, sigma..., [log_prob, entropy].
NetGraphNodes build_policy_graph(diff::Tape& tape, const PolicyArch& arch, bool with_loss_outputs);

/// Checkpoint sidecar metadata.
struct CheckpointManifest {
  PolicyArch arch;
  uint64_t seed = 0;
  uint64_t episodes_trained = 0;
  std::string mode = "nominal";  // nominal | adv-l1 | adv-l2
};

void save_checkpoint(const PolicyNet& net, const CheckpointManifest& manifest,
                     const std::filesystem::path& bin_path);
/// Loads `bin_path` plus its sidecar manifest (same stem, .json extension).
/// Throws std::runtime_error when the manifest architecture and parameter
/// table disagree.
std::pair<PolicyNet, CheckpointManifest> load_checkpoint(const std::filesystem::path& bin_path);

}  // namespace ract::policy
