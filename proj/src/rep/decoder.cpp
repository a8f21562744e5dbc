// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#include "rep/decoder.hpp"

#include <cmath>

namespace vidfield {

Tensor normal_tensor(Shape shape, double stddev, Pcg32& rng) {
  Tensor t(std::move(shape));
  for (auto& v : t.data()) v = static_cast<real>(rng.normal(0.0, stddev));
  return t;
}

void FrameDecoder::init(ParameterSet& params, Pcg32& rng) const {
  auto he = [](std::size_t fan_in) { return std::sqrt(2.0 / static_cast<double>(fan_in)); };
  params.add(name("conv1.weight"), normal_tensor({3, 3, in_channels_, hidden_}, he(9 * in_channels_), rng));
  params.add(name("conv1.bias"), Tensor({hidden_}));
  params.add(name("conv2.weight"), normal_tensor({3, 3, hidden_, hidden_}, he(9 * hidden_), rng));
  params.add(name("conv2.bias"), Tensor({hidden_}));
  params.add(name("head.weight"), normal_tensor({1, 1, hidden_, 3}, he(hidden_), rng));
  params.add(name("head.bias"), Tensor({3}));
}

Var FrameDecoder::decode(Tape& tape, const ParameterSet& params, Var features) const {
  require(features.value().rank() == 3 && features.shape()[2] == in_channels_,
          "decode_frame: expected H x W x " + std::to_string(in_channels_) + " features, got " +
              shape_string(features.shape()));
  auto p = [&](const char* leaf) { return tape.param(params.get(name(leaf))); };
  Var h = ops::leaky_relu(ops::conv2d(features, p("conv1.weight"), p("conv1.bias")));
  h = ops::leaky_relu(ops::conv2d(h, p("conv2.weight"), p("conv2.bias")));
  return ops::sigmoid(ops::conv2d(h, p("head.weight"), p("head.bias")));
}

}  // namespace vidfield
