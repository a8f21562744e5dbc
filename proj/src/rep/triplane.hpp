// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rep/decoder.hpp"
#include "rep/representation.hpp"

namespace vidfield {

// Three N x N x C feature planes: xy indexed (y, x), xt indexed (t, x) and
// yt indexed (t, y), decoded by a FrameDecoder. A space-time point takes the
// concatenation (or, optionally, the sum) of its three bilinear plane samples.
class TriPlaneRep : public Representation {
 public:
  explicit TriPlaneRep(RepConfig config);

  std::size_t feature_width() const { return decoder_.in_channels(); }
  const FrameDecoder& decoder() const { return decoder_; }

  // Feature at normalized (x, y, t); coordinates outside [0, 1] are clamped.
  Tensor triplane_feature(real x, real y, real t) const;
  Var triplane_feature(Tape& tape, real x, real y, real t) const;

  // H_f x W_f x feature_width features at time t, sampled at pixel centers
  // x = j / (W_f - 1), y = i / (H_f - 1).
  Var feature_frame(Tape& tape, real t, std::size_t hf, std::size_t wf) const;

  std::vector<Var> render(Tape& tape, std::span<const real> times) const override;
  using Representation::render;

 private:
  Var combine(std::vector<Var> parts) const;

  FrameDecoder decoder_;
};

}  // namespace vidfield
