// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "core/ops.hpp"

namespace vidfield {

// Two 3x3 convolution blocks with leaky-ReLU(0.2), a 1x1 RGB head and a
// sigmoid. Spatial extent is preserved. The weights live in the owning
// representation's ParameterSet under `<prefix>.*`.
class FrameDecoder {
 public:
  FrameDecoder() = default;
  FrameDecoder(std::string prefix, std::size_t in_channels, std::size_t hidden)
      : prefix_(std::move(prefix)), in_channels_(in_channels), hidden_(hidden) {}

  // Registers freshly initialized weights (He-normal, zero bias).
  void init(ParameterSet& params, Pcg32& rng) const;

  // H x W x C_in features -> H x W x 3 frame in (0, 1).
  Var decode(Tape& tape, const ParameterSet& params, Var features) const;

  std::size_t in_channels() const { return in_channels_; }
  std::size_t hidden() const { return hidden_; }

 private:
  std::string name(const char* leaf) const { return prefix_ + "." + leaf; }

  std::string prefix_;
  std::size_t in_channels_ = 0;
  std::size_t hidden_ = 0;
};

// Normal(0, stddev) tensor drawn from `rng` in row-major order.
Tensor normal_tensor(Shape shape, double stddev, Pcg32& rng);

}  // namespace vidfield
