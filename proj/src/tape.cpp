#include "ract/tape.hpp"

#include <cmath>
#include <stdexcept>

namespace ract::diff {

NodeId Tape::input() {
  NodeId id = push(Op::Input, 0, 0, 0.0);
  inputs_.push_back(id);
  return id;
}

NodeId Tape::constant(double value) { return push(Op::Const, 0, 0, value); }

void Tape::mark_output(NodeId id) {
  check_node(id);
  outputs_.push_back(id);
}

NodeId Tape::unary(Op op, NodeId a) {
  check_node(a);
  return push(op, a, 0, 0.0);
}

NodeId Tape::binary(Op op, NodeId a, NodeId b) {
  check_node(a);
  check_node(b);
  return push(op, a, b, 0.0);
}

NodeId Tape::push(Op op, NodeId a, NodeId b, double v) {
  op_.push_back(op);
  a_.push_back(a);
  b_.push_back(b);
  val_.push_back(v);
  grad_.push_back(0.0);
  return static_cast<NodeId>(op_.size() - 1);
}

void Tape::check_node(NodeId id) const {
  if (id >= op_.size()) throw std::invalid_argument("tape: operand refers to a nonexistent node");
}

std::vector<double> Tape::forward(std::span<const double> inputs) {
  if (inputs.size() != inputs_.size())
    throw std::invalid_argument("tape: input arity mismatch: expected " +
                                std::to_string(inputs_.size()) + ", got " +
                                std::to_string(inputs.size()));
  for (size_t i = 0; i < inputs.size(); ++i) val_[inputs_[i]] = inputs[i];
  run_forward_sweep();
  forward_done_ = true;
  std::vector<double> out(outputs_.size());
  for (size_t i = 0; i < outputs_.size(); ++i) out[i] = val_[outputs_[i]];
  return out;
}

void Tape::run_forward_sweep() {
  const size_t n = op_.size();
  const Op* op = op_.data();
  const NodeId* a = a_.data();
  const NodeId* b = b_.data();
  double* v = val_.data();
  for (size_t i = 0; i < n; ++i) {
    switch (op[i]) {
      case Op::Input:
      case Op::Const:
        break;
      case Op::Add:
        v[i] = v[a[i]] + v[b[i]];
        break;
      case Op::Mul:
        v[i] = v[a[i]] * v[b[i]];
        break;
      case Op::Neg:
        v[i] = -v[a[i]];
        break;
      case Op::Recip:
        v[i] = 1.0 / v[a[i]];
        break;
      case Op::Exp:
        v[i] = std::exp(v[a[i]]);
        break;
      case Op::Log:
        v[i] = std::log(v[a[i]]);
        break;
      case Op::Tanh:
        v[i] = std::tanh(v[a[i]]);
        break;
      case Op::Square:
        v[i] = v[a[i]] * v[a[i]];
        break;
    }
  }
}

std::vector<double> Tape::backward(size_t output_index) {
  if (output_index >= outputs_.size()) throw std::invalid_argument("tape: output index out of range");
  std::vector<double> seeds(outputs_.size(), 0.0);
  seeds[output_index] = 1.0;
  backward_weighted(seeds);
  std::vector<double> g(inputs_.size());
  for (size_t i = 0; i < inputs_.size(); ++i) g[i] = grad_[inputs_[i]];
  return g;
}

void Tape::backward_weighted(std::span<const double> output_seeds) {
  if (!forward_done_) throw std::logic_error("tape: backward requested before any forward pass");
  if (output_seeds.size() != outputs_.size())
    throw std::invalid_argument("tape: output seed arity mismatch");
  std::fill(grad_.begin(), grad_.end(), 0.0);
  for (size_t i = 0; i < outputs_.size(); ++i) grad_[outputs_[i]] += output_seeds[i];
  run_backward_sweep();
}

void Tape::run_backward_sweep() {
  const Op* op = op_.data();
  const NodeId* a = a_.data();
  const NodeId* b = b_.data();
  const double* v = val_.data();
  double* g = grad_.data();
  for (size_t i = op_.size(); i-- > 0;) {
    const double gi = g[i];
    if (gi == 0.0) continue;
    switch (op[i]) {
      case Op::Input:
      case Op::Const:
        break;
      case Op::Add:
        g[a[i]] += gi;
        g[b[i]] += gi;
        break;
      case Op::Mul:
        g[a[i]] += gi * v[b[i]];
        g[b[i]] += gi * v[a[i]];
        break;
      case Op::Neg:
        g[a[i]] -= gi;
        break;
      case Op::Recip:
        g[a[i]] -= gi * v[i] * v[i];
        break;
      case Op::Exp:
        g[a[i]] += gi * v[i];
        break;
      case Op::Log:
        g[a[i]] += gi / v[a[i]];
        break;
      case Op::Tanh:
        g[a[i]] += gi * (1.0 - v[i] * v[i]);
        break;
      case Op::Square:
        g[a[i]] += gi * 2.0 * v[a[i]];
        break;
    }
  }
}

}  // namespace ract::diff
