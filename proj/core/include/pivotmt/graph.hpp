#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pivotmt/tensor.hpp"

namespace pivotmt {

// A named trainable tensor. `grad` is written by Graph::backward.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
  bool frozen = false;
};

// Owns parameters in declaration order; element addresses are stable.
class ParameterStore {
 public:
  Parameter& add(std::string name, Tensor init);
  Parameter* find(std::string_view name) noexcept;
  const Parameter* find(std::string_view name) const noexcept;

  std::size_t size() const noexcept { return params_.size(); }
  auto begin() noexcept { return params_.begin(); }
  auto end() noexcept { return params_.end(); }
  auto begin() const noexcept { return params_.begin(); }
  auto end() const noexcept { return params_.end(); }

  void zero_grad();
  std::size_t scalar_count() const noexcept;

 private:
  std::deque<Parameter> params_;
};

class Graph;

// Handle to a node of a Graph. Cheap to copy; only valid while the graph lives.
struct Var {
  Graph* graph = nullptr;
  std::size_t id = 0;

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  double item() const { return value().item(); }
};

// Tape of operations recorded in topological order. Reverse-mode
// differentiation walks the tape backwards once per backward() call.
class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, std::size_t self)>;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Tensor value);
  // Leaf that receives a gradient but is not tied to a Parameter.
  Var variable(Tensor value);
  // Leaf bound to `p`; binding the same parameter twice returns the same node.
  Var parameter(Parameter& p);

  // Used by op implementations. `value` is rounded to the active precision.
  Var record(Tensor value, std::vector<std::size_t> inputs, BackwardFn backward);

  const Tensor& value(std::size_t id) const { return node_value(nodes_[id]); }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }

  // Gradient of the last backward() loss with respect to `v` (zeros when
  // `v` did not influence the loss).
  Tensor grad(Var v) const;

  // For op implementations during backward: upstream gradient of `self`,
  // and the accumulation buffer of an input (nullptr when the input needs
  // no gradient).
  const Tensor& upstream(std::size_t id) const { return nodes_[id].grad; }
  Tensor* grad_buffer(std::size_t id);

  // Resets every gradient, then accumulates d(loss)/d(node) for all nodes
  // and writes parameter gradients. `loss` must hold exactly one element.
  void backward(Var loss);

  std::size_t size() const noexcept { return nodes_.size(); }
  std::size_t backward_visits() const noexcept { return visits_; }

 private:
  struct Node {
    Tensor owned;
    const Tensor* ref = nullptr;
    Tensor grad;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
    Parameter* param = nullptr;
    bool requires_grad = false;
  };

  static const Tensor& node_value(const Node& n) { return n.ref ? *n.ref : n.owned; }

  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, std::size_t> param_nodes_;
  std::size_t visits_ = 0;
};

}  // namespace pivotmt
