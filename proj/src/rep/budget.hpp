// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rep/config.hpp"

namespace vidfield {

inline constexpr double kBudgetTolerance = 0.05;

struct BudgetMatch {
  RepConfig config;
  std::size_t params = 0;
  std::size_t reference_params = 0;
  double relative_error = 0;  // (params - reference) / reference
  bool within_tolerance = false;
};

// Sizes a `target` family so its trainable parameter count is as close as
// possible to `reference`'s. Geometry, seed, precision and decoder width are
// copied from the reference.
//   voxel:         solve D for the reference's voxel_channels; if no D is
//                  within tolerance, also search C_v.
//   posenc:        solve mlp_hidden for the reference's mlp_depth and L.
//   triplane_flow: solve global_channels at the reference N; if none is
//                  within tolerance, also search the plane resolution.
//   triplane:      solve plane_channels, then plane_resolution.
// The same family returns the reference unchanged. When nothing lands within
// ±5% the closest configuration is returned with within_tolerance = false.
BudgetMatch match_param_budget(const RepConfig& reference, Family target);

double budget_error(std::size_t params, std::size_t reference);

}  // namespace vidfield
