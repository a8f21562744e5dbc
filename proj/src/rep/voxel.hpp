// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rep/decoder.hpp"
#include "rep/representation.hpp"

namespace vidfield {

// Dense D x D x D x C_v feature volume indexed (t, y, x) with the same frame
// decoder as the tri-plane; the memory-matched explicit baseline.
class VoxelRep : public Representation {
 public:
  explicit VoxelRep(RepConfig config);

  const FrameDecoder& decoder() const { return decoder_; }
  Var feature_frame(Tape& tape, real t, std::size_t hf, std::size_t wf) const;

  std::vector<Var> render(Tape& tape, std::span<const real> times) const override;
  using Representation::render;

 private:
  FrameDecoder decoder_;
};

}  // namespace vidfield
