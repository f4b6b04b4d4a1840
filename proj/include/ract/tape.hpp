#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ract::diff {

using NodeId = uint32_t;

enum class Op : uint8_t {
  Input,
  Const,
  Add,
  Mul,
  Neg,
  Recip,
  Exp,
  Log,
  Tanh,
  Square,
};

/// Append-only scalar expression tape with reverse-mode differentiation.
///
/// Nodes are stored struct-of-arrays; operand ids always point at earlier
/// nodes, so one forward sweep evaluates the whole tape and one reverse
/// sweep accumulates exact gradients. A tape is built once and re-run with
/// fresh input values arbitrarily often.
class Tape {
 public:
  // -- graph construction -----------------------------------------------
  NodeId input();
  NodeId constant(double value);
  NodeId add(NodeId a, NodeId b) { return binary(Op::Add, a, b); }
  NodeId mul(NodeId a, NodeId b) { return binary(Op::Mul, a, b); }
  NodeId neg(NodeId a) { return unary(Op::Neg, a); }
  NodeId reciprocal(NodeId a) { return unary(Op::Recip, a); }
  NodeId exp(NodeId a) { return unary(Op::Exp, a); }
  NodeId log(NodeId a) { return unary(Op::Log, a); }
  NodeId tanh(NodeId a) { return unary(Op::Tanh, a); }
  NodeId square(NodeId a) { return unary(Op::Square, a); }

  // Composites of the primitive set.
  NodeId sub(NodeId a, NodeId b) { return add(a, neg(b)); }
  NodeId div(NodeId a, NodeId b) { return mul(a, reciprocal(b)); }

  void mark_output(NodeId id);

  size_t num_inputs() const { return inputs_.size(); }
  size_t num_outputs() const { return outputs_.size(); }
  size_t num_nodes() const { return op_.size(); }
  NodeId input_node(size_t i) const { return inputs_[i]; }
  NodeId output_node(size_t i) const { return outputs_[i]; }

  // -- execution ---------------------------------------------------------
  /// Runs the forward sweep; `inputs` must match the declared input arity.
  /// Returns the declared output values.
  std::vector<double> forward(std::span<const double> inputs);

  /// Reverse sweep from one declared output; returns d(output)/d(input_i)
  /// for every declared input. Requires a prior forward pass.
  std::vector<double> backward(size_t output_index);

  /// General reverse sweep: seeds every declared output with the given
  /// cotangent weight. Gradients are then readable via `gradient()`.
  void backward_weighted(std::span<const double> output_seeds);

  double value(NodeId id) const { return val_[id]; }
  double gradient(NodeId id) const { return grad_[id]; }

 private:
  NodeId unary(Op op, NodeId a);
  NodeId binary(Op op, NodeId a, NodeId b);
  NodeId push(Op op, NodeId a, NodeId b, double v);
  void check_node(NodeId id) const;
  void run_forward_sweep();
  void run_backward_sweep();

  std::vector<Op> op_;
  std::vector<NodeId> a_, b_;
  std::vector<double> val_, grad_;
  std::vector<NodeId> inputs_;
  std::vector<NodeId> outputs_;
  bool forward_done_ = false;
};

}  // namespace ract::diff
