#include "pivotmt/graph.hpp"

#include "pivotmt/error.hpp"

namespace pivotmt {

Parameter& ParameterStore::add(std::string name, Tensor init) {
  if (find(name)) throw ContractError("parameter store: duplicate name '" + name + "'");
  Tensor grad(init.shape());
  params_.push_back(Parameter{std::move(name), std::move(init), std::move(grad), false});
  return params_.back();
}

Parameter* ParameterStore::find(std::string_view name) noexcept {
  for (auto& p : params_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

const Parameter* ParameterStore::find(std::string_view name) const noexcept {
  for (const auto& p : params_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

void ParameterStore::zero_grad() {
  for (auto& p : params_) p.grad = Tensor(p.value.shape());
}

std::size_t ParameterStore::scalar_count() const noexcept {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

const Tensor& Var::value() const { return graph->value(id); }

Var Graph::constant(Tensor value) {
  value.round_to_precision();
  Node n;
  n.owned = std::move(value);
  nodes_.push_back(std::move(n));
  return Var{this, nodes_.size() - 1};
}

Var Graph::variable(Tensor value) {
  Var v = constant(std::move(value));
  nodes_[v.id].requires_grad = true;
  return v;
}

Var Graph::parameter(Parameter& p) {
  if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) return Var{this, it->second};
  Node n;
  n.ref = &p.value;
  n.param = &p;
  n.requires_grad = true;
  nodes_.push_back(std::move(n));
  param_nodes_.emplace(&p, nodes_.size() - 1);
  return Var{this, nodes_.size() - 1};
}

Var Graph::record(Tensor value, std::vector<std::size_t> inputs, BackwardFn backward) {
  value.round_to_precision();
  Node n;
  n.owned = std::move(value);
  for (std::size_t in : inputs) {
    if (nodes_[in].requires_grad) n.requires_grad = true;
  }
  if (n.requires_grad) n.backward = std::move(backward);
  n.inputs = std::move(inputs);
  nodes_.push_back(std::move(n));
  return Var{this, nodes_.size() - 1};
}

Tensor Graph::grad(Var v) const {
  const Node& n = nodes_[v.id];
  if (n.grad.empty()) return Tensor(node_value(n).shape());
  return n.grad;
}

Tensor* Graph::grad_buffer(std::size_t id) {
  Node& n = nodes_[id];
  if (!n.requires_grad) return nullptr;
  if (n.grad.empty()) n.grad = Tensor(node_value(n).shape());
  return &n.grad;
}

void Graph::backward(Var loss) {
  if (loss.graph != this) throw ContractError("backward: loss belongs to another graph");
  const Tensor& lv = value(loss.id);
  if (lv.size() != 1) {
    throw ContractError("backward: loss must be a scalar, got shape " + shape_string(lv.shape()));
  }
  for (auto& n : nodes_) n.grad = Tensor();
  visits_ = 0;

  if (Tensor* g = grad_buffer(loss.id)) {
    (*g)[0] = 1.0;
    for (std::size_t id = loss.id + 1; id-- > 0;) {
      Node& n = nodes_[id];
      if (!n.backward || n.grad.empty()) continue;
      n.backward(*this, id);
      ++visits_;
    }
  }

  for (auto& n : nodes_) {
    if (!n.param) continue;
    n.param->grad = Tensor(n.param->value.shape());
    if (!n.grad.empty()) {
      auto dst = n.param->grad.data();
      auto src = n.grad.data();
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    }
  }
}

}  // namespace pivotmt
