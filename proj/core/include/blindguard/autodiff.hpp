#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "blindguard/tensor.hpp"

namespace blindguard {

class Graph;

/// Handle to a node recorded on a Graph. Cheap to copy; only valid while the
/// owning graph is alive.
struct Var {
  Graph* graph = nullptr;
  std::size_t id = 0;

  const Tensor& value() const;
  const Shape& shape() const;
  bool tracked() const;
  /// Accumulated gradient after Graph::backward (zeros if none reached this node).
  Tensor grad() const;
};

/// Define-by-run tape. Nodes are appended in execution order, so every node's
/// inputs precede it and a reverse sweep is a valid topological order.
///
/// A graph is confined to one thread. backward() may run once; call
/// reset_gradients() before running it again.
class Graph {
 public:
  /// Called during backward with the gradient flowing into the node.
  using BackwardFn = std::function<void(Graph&, std::span<const double> out_grad)>;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var leaf(Tensor value, bool track);
  Var constant(Tensor value) { return leaf(std::move(value), false); }

  /// Appends an operation node. The node is tracked iff any input is tracked;
  /// `backward` is dropped for untracked nodes.
  Var record(Tensor value, std::span<const Var> inputs, BackwardFn backward);
  Var record(Tensor value, std::initializer_list<Var> inputs, BackwardFn backward) {
    return record(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()), std::move(backward));
  }

  void backward(Var loss);
  void reset_gradients();
  bool backward_done() const noexcept { return backward_done_; }

  const Tensor& value(std::size_t id) const { return nodes_.at(id).value; }
  bool tracked(std::size_t id) const { return nodes_.at(id).track; }
  Tensor grad(std::size_t id) const;

  /// Gradient accumulator of a node, allocated on first use. For use inside
  /// BackwardFn implementations.
  std::span<double> grad_buffer(std::size_t id);

  std::size_t size() const noexcept { return nodes_.size(); }
  /// Number of nodes whose backward rule ran in the last backward() call.
  std::size_t backward_visits() const noexcept { return visits_; }

 private:
  struct Node {
    Tensor value;
    std::vector<double> grad;
    bool track = false;
    BackwardFn backward;
  };

  Var make_var(std::size_t id) { return Var{this, id}; }

  std::vector<Node> nodes_;
  bool backward_done_ = false;
  std::size_t visits_ = 0;
};

}  // namespace blindguard
