// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <deque>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "core/tensor.hpp"

namespace vidfield {

// A trainable tensor and its gradient accumulator.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
};

// Named parameters in registration order. References stay valid for the
// lifetime of the set.
class ParameterSet {
 public:
  ParameterSet() = default;
  ParameterSet(const ParameterSet&) = delete;
  ParameterSet& operator=(const ParameterSet&) = delete;
  ParameterSet(ParameterSet&&) = default;
  ParameterSet& operator=(ParameterSet&&) = default;

  Parameter& add(std::string name, Tensor init);
  Parameter& get(std::string_view name);
  const Parameter& get(std::string_view name) const;
  bool contains(std::string_view name) const;

  std::deque<Parameter>& all() { return params_; }
  const std::deque<Parameter>& all() const { return params_; }

  std::size_t total_size() const;
  void zero_grad();

 private:
  std::deque<Parameter> params_;
};

class Tape;

// Handle to a value recorded on a Tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape& tape() const { return *tape_; }
  std::size_t id() const { return id_; }
  // Stays valid for the lifetime of the tape.
  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  std::size_t size() const { return value().size(); }
  bool requires_grad() const;

 private:
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

// Flat, append-only record of executed operations. backward() walks the
// record in exact reverse order; it is single-threaded and deterministic.
class Tape {
 public:
  // Receives the gradient and value of the node's output and accumulates
  // into the inputs' gradients.
  using BackwardFn = std::function<void(Tape&, const Tensor& out_grad, const Tensor& out_value)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  Var leaf(Tensor value);
  // Registers `p`; repeated calls for the same parameter return the same node.
  // The tape reads p.value in place, so it must outlive the tape unchanged.
  Var param(const Parameter& p);

  // Appends an op node. Its value is checked for finiteness; `fn` is kept only
  // when some input requires a gradient.
  Var record(std::string_view op, Tensor value, std::initializer_list<Var> inputs, BackwardFn fn);
  Var record(std::string_view op, Tensor value, const std::vector<Var>& inputs, BackwardFn fn);

  const Tensor& value(std::size_t id) const;
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  std::string_view op_name(std::size_t id) const { return nodes_[id].op; }
  std::size_t size() const { return nodes_.size(); }

  // Gradient accumulator for `v`, allocated as zeros on first use.
  Tensor& grad_ref(Var v);

  // Seeds d(root)/d(root) = 1 for a single-element root after clearing every
  // node gradient, then propagates in reverse record order.
  void backward(Var root);

  // Adds the gradients of the parameters registered on this tape into the
  // matching accumulators of `params` (matched by identity).
  void accumulate_grads(ParameterSet& params) const;

  // Gradient of `v` from the last backward() (zeros if none reached it).
  Tensor grad(Var v) const;

  std::vector<const Parameter*> parameters() const;
  Tensor param_grad(const Parameter& p) const;

 private:
  struct Node {
    std::string op;
    Tensor value;
    const Tensor* external = nullptr;
    Tensor grad;
    bool has_grad = false;
    bool requires_grad = false;
    const Parameter* param = nullptr;
    BackwardFn backward;
  };

  Var push(Node node);

  std::deque<Node> nodes_;
  std::unordered_map<const Parameter*, std::size_t> param_nodes_;
  std::vector<std::size_t> param_order_;
};

// Test-only fault injection: scales the gradient flowing into the backward
// rule of every node whose op name equals `op`. An empty name disables it.
void set_gradient_fault(std::string op, real factor);
void clear_gradient_fault();

}  // namespace vidfield
