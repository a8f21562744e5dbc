// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "rep/decoder.hpp"
#include "rep/representation.hpp"

namespace vidfield {

// Per feature-time step output of the flow decoder on the N x N grid.
// Flows are in feature-grid cells: `local` moves the previous appearance
// slice one step, `global` displaces the static global plane.
struct FlowFieldVars {
  Var local;   // N x N x 2
  Var global;  // N x N x 2
  Var mask;    // N x N x 1, sigmoid output
};

struct FlowField {
  Tensor local;
  Tensor global;
  Tensor mask;
};

// T_f slices of N x N x C_G features.
struct AppearanceVolume {
  std::vector<Tensor> slices;
};

// Tri-plane + flow: a static global plane F_G is animated by flows decoded
// from three motion planes through a two-layer MLP (3 C_m -> W_h -> 5). The
// appearance volume follows the recurrence
//   F(0) = F_G
//   F(s) = m_s * warp(F_G, g_s) + (1 - m_s) * warp(F(s - 1), l_s)
// and frames decode a time-interpolated, resampled slice.
class FlowTriPlaneRep : public Representation {
 public:
  explicit FlowTriPlaneRep(RepConfig config);

  std::size_t grid() const { return config_.plane_resolution; }
  std::size_t feature_frames() const { return config_.effective_feature_frames(); }
  const FrameDecoder& decoder() const { return decoder_; }

  FlowFieldVars decode_flow(Tape& tape, std::size_t step) const;
  FlowField decode_flow(std::size_t step) const;

  // Slices 0..last (inclusive) of the recurrence.
  std::vector<Var> appearance_recurrence(Tape& tape, std::size_t last) const;
  AppearanceVolume appearance_recurrence() const;

  // N x N x C_G feature frame at normalized time t, from `slices`.
  Var feature_frame(std::span<const Var> slices, real t) const;

  std::vector<Var> render(Tape& tape, std::span<const real> times) const override;
  using Representation::render;

 private:
  // Slice pair and weight of the upper slice for time t.
  struct SliceBlend {
    std::size_t lo, hi;
    real upper;
  };
  SliceBlend locate(real t) const;

  FrameDecoder decoder_;
};

}  // namespace vidfield
