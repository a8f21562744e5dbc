// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#include "core/tape.hpp"

#include <mutex>

namespace vidfield {

Parameter& ParameterSet::add(std::string name, Tensor init) {
  require(!contains(name), "duplicate parameter name: " + name);
  Tensor grad(init.shape());
  params_.push_back(Parameter{std::move(name), std::move(init), std::move(grad)});
  return params_.back();
}

Parameter& ParameterSet::get(std::string_view name) {
  for (auto& p : params_)
    if (p.name == name) return p;
  fail(ErrorCode::invalid_argument, "unknown parameter: " + std::string(name));
}

const Parameter& ParameterSet::get(std::string_view name) const {
  return const_cast<ParameterSet*>(this)->get(name);
}

bool ParameterSet::contains(std::string_view name) const {
  for (const auto& p : params_)
    if (p.name == name) return true;
  return false;
}

std::size_t ParameterSet::total_size() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

void ParameterSet::zero_grad() {
  for (auto& p : params_) {
    if (p.grad.shape() != p.value.shape()) p.grad = Tensor(p.value.shape());
    p.grad.fill(0);
  }
}

const Tensor& Var::value() const { return tape_->value(id_); }
bool Var::requires_grad() const { return tape_->requires_grad(id_); }

namespace {
std::mutex g_fault_mutex;
std::string g_fault_op;
real g_fault_factor = 1;
}  // namespace

void set_gradient_fault(std::string op, real factor) {
  std::lock_guard lock(g_fault_mutex);
  g_fault_op = std::move(op);
  g_fault_factor = factor;
}

void clear_gradient_fault() { set_gradient_fault({}, 1); }

Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Tensor value) {
  Node n;
  n.op = "constant";
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::leaf(Tensor value) {
  Node n;
  n.op = "leaf";
  n.value = std::move(value);
  n.requires_grad = true;
  return push(std::move(n));
}

Var Tape::param(const Parameter& p) {
  if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) return Var(this, it->second);
  Node n;
  n.op = "param";
  n.external = &p.value;
  n.requires_grad = true;
  n.param = &p;
  Var v = push(std::move(n));
  param_nodes_.emplace(&p, v.id());
  param_order_.push_back(v.id());
  return v;
}

Var Tape::record(std::string_view op, Tensor value, std::initializer_list<Var> inputs, BackwardFn fn) {
  return record(op, std::move(value), std::vector<Var>(inputs), std::move(fn));
}

Var Tape::record(std::string_view op, Tensor value, const std::vector<Var>& inputs, BackwardFn fn) {
  check_finite(value, std::string(op).c_str());
  Node n;
  n.op = std::string(op);
  n.value = std::move(value);
  for (const auto& in : inputs) {
    require(&in.tape() == this, std::string(op) + ": input belongs to a different tape");
    n.requires_grad = n.requires_grad || nodes_[in.id()].requires_grad;
  }
  if (n.requires_grad) n.backward = std::move(fn);
  return push(std::move(n));
}

const Tensor& Tape::value(std::size_t id) const {
  const Node& n = nodes_.at(id);
  return n.external ? *n.external : n.value;
}

Tensor& Tape::grad_ref(Var v) {
  Node& n = nodes_.at(v.id());
  if (!n.has_grad) {
    n.grad = Tensor(value(v.id()).shape());
    n.has_grad = true;
  }
  return n.grad;
}

void Tape::backward(Var root) {
  require(&root.tape() == this, "backward: root belongs to a different tape");
  require(root.size() == 1, "backward: root must hold a single value, got " + shape_string(root.shape()));
  for (auto& n : nodes_) {
    n.has_grad = false;
    n.grad = Tensor();
  }
  grad_ref(root)[0] = 1;

  std::string fault_op;
  real fault_factor = 1;
  {
    std::lock_guard lock(g_fault_mutex);
    fault_op = g_fault_op;
    fault_factor = g_fault_factor;
  }

  for (std::size_t i = root.id() + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.has_grad || !n.backward) continue;
    if (!fault_op.empty() && n.op == fault_op) {
      Tensor scaled = n.grad;
      for (auto& g : scaled.data()) g *= fault_factor;
      n.backward(*this, scaled, n.value);
    } else {
      // The rule may allocate other nodes' gradients but never this one's.
      const Tensor& g = n.grad;
      n.backward(*this, g, n.value);
    }
  }
}

void Tape::accumulate_grads(ParameterSet& params) const {
  for (auto& p : params.all()) {
    auto it = param_nodes_.find(&p);
    if (it == param_nodes_.end()) continue;
    const Node& n = nodes_[it->second];
    if (!n.has_grad) continue;
    if (p.grad.shape() != p.value.shape()) p.grad = Tensor(p.value.shape());
    real* dst = p.grad.ptr();
    const real* src = n.grad.ptr();
    for (std::size_t k = 0; k < p.grad.size(); ++k) dst[k] += src[k];
  }
}

Tensor Tape::param_grad(const Parameter& p) const {
  auto it = param_nodes_.find(&p);
  if (it == param_nodes_.end()) return Tensor(p.value.shape());
  return grad(Var(const_cast<Tape*>(this), it->second));
}

Tensor Tape::grad(Var v) const {
  const Node& n = nodes_.at(v.id());
  if (!n.has_grad) return Tensor(value(v.id()).shape());
  return n.grad;
}

std::vector<const Parameter*> Tape::parameters() const {
  std::vector<const Parameter*> out;
  out.reserve(param_order_.size());
  for (std::size_t id : param_order_) out.push_back(nodes_[id].param);
  return out;
}

}  // namespace vidfield
