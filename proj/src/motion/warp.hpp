// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "core/ops.hpp"

namespace vidfield {

// Accumulated targets of bilinear splatting before normalization.
struct SplatResult {
  Tensor accumulated;  // H x W x C, sum of weight * feature
  Tensor weights;      // H x W x 1, sum of weights
};

inline constexpr real kSplatEpsilon = real(1e-6);

// Scatters features[p] (H x W x C) to the four cells around p + flow[p]
// (flow is H x W x 2 holding (dx, dy) in cells) with bilinear weights.
// Contributions landing outside the grid are dropped.
SplatResult splat(const Tensor& features, const Tensor& flow);

// Normalized forward warp: accumulated / weights where weights >= 1e-6,
// zero elsewhere. Differentiable with respect to features and flow. A zero
// flow reproduces the features bitwise.
Var forward_warp(Var features, Var flow);

}  // namespace vidfield
