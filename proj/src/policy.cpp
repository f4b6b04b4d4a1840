#include "ract/policy.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "ract/io_util.hpp"

namespace ract::policy {

namespace {

constexpr const char* kTrunkW = "trunk.w";
constexpr const char* kTrunkB = "trunk.b";

std::string seg_name(const char* base, int i) { return std::string(base) + std::to_string(i); }

// Fills W (rows x cols, row-major) with a gain-scaled orthogonal-like
// matrix: Gaussian draws, modified Gram-Schmidt along the short dimension.
void orthogonal_init(std::span<double> w, int rows, int cols, double gain, RngStream& rng) {
  for (auto& x : w) x = rng.normal();
  const bool by_rows = rows <= cols;
  const int vecs = by_rows ? rows : cols;
  const int dim = by_rows ? cols : rows;
  auto at = [&](int v, int d) -> double& {
    return by_rows ? w[static_cast<size_t>(v) * cols + d] : w[static_cast<size_t>(d) * cols + v];
  };
  for (int v = 0; v < vecs; ++v) {
    for (int u = 0; u < v; ++u) {
      double dot = 0.0;
      for (int d = 0; d < dim; ++d) dot += at(u, d) * at(v, d);
      for (int d = 0; d < dim; ++d) at(v, d) -= dot * at(u, d);
    }
    double norm_sq = 0.0;
    for (int d = 0; d < dim; ++d) norm_sq += at(v, d) * at(v, d);
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (int d = 0; d < dim; ++d) at(v, d) *= inv;
  }
  for (auto& x : w) x *= gain;
}

}  // namespace

diff::ParameterVector PolicyNet::make_params(const PolicyArch& arch) {
  diff::ParameterVector pv;
  int in_dim = arch.state_dim;
  for (int layer = 0; layer < arch.trunk_layers; ++layer) {
    pv.add_segment(seg_name(kTrunkW, layer), static_cast<uint64_t>(arch.trunk_width) * in_dim);
    pv.add_segment(seg_name(kTrunkB, layer), arch.trunk_width);
    in_dim = arch.trunk_width;
  }
  pv.add_segment("actor.w", static_cast<uint64_t>(arch.action_dim) * arch.trunk_width);
  pv.add_segment("actor.b", arch.action_dim);
  pv.add_segment("critic.w", arch.trunk_width);
  pv.add_segment("critic.b", 1);
  pv.add_segment("log_std", arch.action_dim);
  return pv;
}

NetGraphNodes build_policy_graph(diff::Tape& tape, const PolicyArch& arch, bool with_loss_outputs) {
  NetGraphNodes nodes;
  const auto layout = PolicyNet::make_params(arch);
  nodes.param_count = layout.size();

  std::vector<diff::NodeId> params(layout.size());
  for (auto& id : params) id = tape.input();
  for (int i = 0; i < arch.state_dim; ++i) nodes.state_inputs.push_back(tape.input());
  if (with_loss_outputs)
    for (int i = 0; i < arch.action_dim; ++i) nodes.action_inputs.push_back(tape.input());

  auto seg_nodes = [&](std::string_view name) {
    for (const auto& s : layout.segments())
      if (s.name == name) return std::span<diff::NodeId>(params.data() + s.offset, s.length);
    throw std::logic_error("policy graph: missing segment");
  };

  auto dense = [&](std::span<const diff::NodeId> x, std::span<diff::NodeId> w,
                   std::span<diff::NodeId> b, int out_dim, bool squash) {
    std::vector<diff::NodeId> y(out_dim);
    const int in_dim = static_cast<int>(x.size());
    for (int j = 0; j < out_dim; ++j) {
      diff::NodeId acc = b[j];
      for (int i = 0; i < in_dim; ++i)
        acc = tape.add(acc, tape.mul(w[static_cast<size_t>(j) * in_dim + i], x[i]));
      y[j] = squash ? tape.tanh(acc) : acc;
    }
    return y;
  };

  std::vector<diff::NodeId> h(nodes.state_inputs.begin(), nodes.state_inputs.end());
  for (int layer = 0; layer < arch.trunk_layers; ++layer)
    h = dense(h, seg_nodes(seg_name(kTrunkW, layer)), seg_nodes(seg_name(kTrunkB, layer)),
              arch.trunk_width, true);

  nodes.mean_nodes = dense(h, seg_nodes("actor.w"), seg_nodes("actor.b"), arch.action_dim, true);
  nodes.value_node = dense(h, seg_nodes("critic.w"), seg_nodes("critic.b"), 1, false)[0];

  auto log_std = seg_nodes("log_std");
  for (int d = 0; d < arch.action_dim; ++d) nodes.sigma_nodes.push_back(tape.exp(log_std[d]));

  for (auto id : nodes.mean_nodes) tape.mark_output(id);
  tape.mark_output(nodes.value_node);
  for (auto id : nodes.sigma_nodes) tape.mark_output(id);

  if (with_loss_outputs) {
    // Canonical per-dim order, mirrored by the closed forms in gaussian.cpp:
    // z = (a - mean) * (1/sigma); term = (c - log_std) - 0.5*z^2.
    const diff::NodeId c_neg_half_log_2pi = tape.constant(kNegHalfLog2Pi);
    const diff::NodeId c_half = tape.constant(0.5);
    std::vector<diff::NodeId> terms(arch.action_dim);
    for (int d = 0; d < arch.action_dim; ++d) {
      const diff::NodeId inv_sigma = tape.reciprocal(nodes.sigma_nodes[d]);
      const diff::NodeId z =
          tape.mul(tape.sub(nodes.action_inputs[d], nodes.mean_nodes[d]), inv_sigma);
      const diff::NodeId half_zsq = tape.mul(c_half, tape.square(z));
      terms[d] = tape.sub(tape.sub(c_neg_half_log_2pi, log_std[d]), half_zsq);
    }
    diff::NodeId log_prob = terms[0];
    for (int d = 1; d < arch.action_dim; ++d) log_prob = tape.add(log_prob, terms[d]);
    nodes.log_prob_node = log_prob;

    const diff::NodeId c_ent = tape.constant(kHalfPlusHalfLog2Pi);
    diff::NodeId ent = tape.add(c_ent, log_std[0]);
    for (int d = 1; d < arch.action_dim; ++d)
      ent = tape.add(ent, tape.add(c_ent, log_std[d]));
    nodes.entropy_node = ent;

    tape.mark_output(nodes.log_prob_node);
    tape.mark_output(nodes.entropy_node);
  }
  return nodes;
}

PolicyNet::PolicyNet(PolicyArch arch, RngStream& init_rng)
    : arch_(arch), params_(make_params(arch)) {
  int in_dim = arch.state_dim;
  const double trunk_gain = std::sqrt(2.0);
  for (int layer = 0; layer < arch.trunk_layers; ++layer) {
    orthogonal_init(params_.segment(seg_name(kTrunkW, layer)), arch.trunk_width, in_dim,
                    trunk_gain, init_rng);
    in_dim = arch.trunk_width;
  }
  orthogonal_init(params_.segment("actor.w"), arch.action_dim, arch.trunk_width, 0.01, init_rng);
  orthogonal_init(params_.segment("critic.w"), 1, arch.trunk_width, 1.0, init_rng);
  // Biases and log_std start at zero (make_params zero-fills).

  nodes_ = build_policy_graph(tape_, arch_, false);
  input_buf_.assign(params_.size() + arch_.state_dim, 0.0);
}

PolicyNet::PolicyNet(PolicyArch arch, diff::ParameterVector params)
    : arch_(arch), params_(std::move(params)) {
  const auto layout = make_params(arch);
  if (layout.size() != params_.size())
    throw std::runtime_error("policy: parameter count does not match architecture");
  nodes_ = build_policy_graph(tape_, arch_, false);
  input_buf_.assign(params_.size() + arch_.state_dim, 0.0);
}

void PolicyNet::clamp_log_std() {
  for (double& v : params_.segment("log_std")) v = std::clamp(v, kLogStdMin, kLogStdMax);
  params_dirty_ = true;
}

std::pair<GaussianActionDist, double> PolicyNet::forward(const std::array<double, 8>& state) const {
  for (double v : state)
    if (!std::isfinite(v)) throw std::invalid_argument("policy: non-finite state component");
  if (params_dirty_) {
    std::copy(params_.values().begin(), params_.values().end(), input_buf_.begin());
    params_dirty_ = false;
  }
  std::copy(state.begin(), state.end(), input_buf_.begin() + params_.size());
  const auto out = tape_.forward(input_buf_);

  GaussianActionDist dist;
  const auto log_std = params_.segment("log_std");
  for (int d = 0; d < arch_.action_dim; ++d) {
    dist.mean[d] = out[d];
    dist.std[d] = out[arch_.action_dim + 1 + d];
    dist.log_std[d] = log_std[d];
  }
  return {dist, out[arch_.action_dim]};
}

void save_checkpoint(const PolicyNet& net, const CheckpointManifest& manifest,
                     const std::filesystem::path& bin_path) {
  net.params().save(bin_path);
  nlohmann::ordered_json j;
  j["arch"] = {{"state_dim", manifest.arch.state_dim},
               {"action_dim", manifest.arch.action_dim},
               {"trunk_width", manifest.arch.trunk_width},
               {"trunk_layers", manifest.arch.trunk_layers}};
  j["seed"] = manifest.seed;
  j["episodes_trained"] = manifest.episodes_trained;
  j["mode"] = manifest.mode;
  auto manifest_path = bin_path;
  manifest_path.replace_extension(".json");
  write_file(manifest_path, j.dump(2) + "\n");
}

std::pair<PolicyNet, CheckpointManifest> load_checkpoint(const std::filesystem::path& bin_path) {
  auto params = diff::ParameterVector::load(bin_path);
  auto manifest_path = bin_path;
  manifest_path.replace_extension(".json");
  CheckpointManifest m;
  const auto j = nlohmann::json::parse(read_file(manifest_path));
  m.arch.state_dim = j.at("arch").at("state_dim").get<int>();
  m.arch.action_dim = j.at("arch").at("action_dim").get<int>();
  m.arch.trunk_width = j.at("arch").at("trunk_width").get<int>();
  m.arch.trunk_layers = j.at("arch").at("trunk_layers").get<int>();
  m.seed = j.at("seed").get<uint64_t>();
  m.episodes_trained = j.at("episodes_trained").get<uint64_t>();
  m.mode = j.at("mode").get<std::string>();

  const auto layout = PolicyNet::make_params(m.arch);
  if (layout.size() != params.size())
    throw std::runtime_error("checkpoint: manifest architecture does not match parameter table (" +
                             std::to_string(layout.size()) + " vs " +
                             std::to_string(params.size()) + " values)");
  return {PolicyNet(m.arch, std::move(params)), m};
}

}  // namespace ract::policy
