// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#include "fit/adam.hpp"

#include <cmath>

namespace vidfield {

void adam_step(Tensor& param, const Tensor& grad, AdamState& state, const AdamHyper& hyper) {
  require(grad.shape() == param.shape(), "adam_step: gradient shape differs from parameter");
  if (state.m.shape() != param.shape()) {
    require(state.step == 0, "adam_step: optimizer state does not match parameter shape");
    state.m = Tensor(param.shape());
    state.v = Tensor(param.shape());
  }
  if (!grad.all_finite()) fail(ErrorCode::numeric, "adam_step: non-finite gradient");
  ++state.step;
  const double b1 = hyper.beta1, b2 = hyper.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  const double lr = hyper.lr;
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double g = grad[i];
    const double m = b1 * state.m[i] + (1 - b1) * g;
    const double v = b2 * state.v[i] + (1 - b2) * g * g;
    state.m[i] = static_cast<real>(m);
    state.v[i] = static_cast<real>(v);
    param[i] -= static_cast<real>(lr * (m / c1) / (std::sqrt(v / c2) + hyper.epsilon));
  }
}

void Adam::step(ParameterSet& params) {
  auto& all = params.all();
  if (states_.size() != all.size()) states_.assign(all.size(), AdamState{});
  std::size_t k = 0;
  for (auto& p : all) adam_step(p.value, p.grad, states_[k++], hyper_);
}

}  // namespace vidfield
