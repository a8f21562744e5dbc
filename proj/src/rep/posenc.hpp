// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rep/representation.hpp"

namespace vidfield {

// [x, y, t, then sin(2^l pi u), cos(2^l pi u) for l = 0..L-1 and u in
// (x, y, t)]; width 6L + 3.
Tensor positional_encoding(real x, real y, real t, std::size_t num_frequencies);

// Fully implicit baseline: an MLP from the encoded (x, y, t) straight to RGB.
// `mlp_depth` leaky-ReLU hidden layers of width `mlp_hidden`, sigmoid output.
class PosEncMlpRep : public Representation {
 public:
  explicit PosEncMlpRep(RepConfig config);

  std::size_t encoding_width() const { return 6 * config_.num_frequencies + 3; }

  std::vector<Var> render(Tape& tape, std::span<const real> times) const override;
  using Representation::render;
};

}  // namespace vidfield
