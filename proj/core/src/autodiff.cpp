#include "blindguard/autodiff.hpp"

#include <algorithm>

#include "blindguard/errors.hpp"

namespace blindguard {

const Tensor& Var::value() const { return graph->value(id); }
const Shape& Var::shape() const { return graph->value(id).shape(); }
bool Var::tracked() const { return graph->tracked(id); }
Tensor Var::grad() const { return graph->grad(id); }

Var Graph::leaf(Tensor value, bool track) {
  nodes_.push_back(Node{std::move(value), {}, track, {}});
  return make_var(nodes_.size() - 1);
}

Var Graph::record(Tensor value, std::span<const Var> inputs, BackwardFn backward) {
  bool track = false;
  for (const Var& in : inputs) {
    if (in.graph != this) throw ContractError("operation mixes nodes from different graphs");
    if (in.id >= nodes_.size()) throw ContractError("operation input does not exist yet");
    track = track || nodes_[in.id].track;
  }
  if (backward_done_) throw StateError("cannot record operations after backward(); build a new graph");
  nodes_.push_back(Node{std::move(value), {}, track, track ? std::move(backward) : BackwardFn{}});
  return make_var(nodes_.size() - 1);
}

void Graph::backward(Var loss) {
  if (loss.graph != this) throw ContractError("loss belongs to another graph");
  if (backward_done_) {
    throw StateError("backward() already ran on this graph; call reset_gradients() first");
  }
  const Node& root = nodes_.at(loss.id);
  if (root.value.size() != 1) {
    throw ContractError("backward() needs a scalar loss, got shape " + to_string(root.value.shape()));
  }
  if (!root.track) throw ContractError("backward() on an untracked loss");

  backward_done_ = true;
  visits_ = 0;
  grad_buffer(loss.id)[0] = 1.0;
  for (std::size_t id = loss.id + 1; id-- > 0;) {
    Node& node = nodes_[id];
    if (!node.track || node.grad.empty() || !node.backward) continue;
    // Copy the handle: the rule may allocate gradient buffers in other nodes,
    // but never appends nodes, so references into nodes_ stay valid.
    node.backward(*this, std::span<const double>(node.grad));
    ++visits_;
  }
}

void Graph::reset_gradients() {
  for (Node& node : nodes_) node.grad.clear();
  backward_done_ = false;
  visits_ = 0;
}

Tensor Graph::grad(std::size_t id) const {
  const Node& node = nodes_.at(id);
  if (node.grad.empty()) return Tensor(node.value.shape());
  return Tensor(node.value.shape(), node.grad);
}

std::span<double> Graph::grad_buffer(std::size_t id) {
  Node& node = nodes_.at(id);
  if (node.grad.empty()) node.grad.assign(node.value.size(), 0.0);
  return node.grad;
}

}  // namespace blindguard
