// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace vidfield {

enum class HoldoutMode { interpolation, extrapolation };

std::string to_string(HoldoutMode m);
HoldoutMode holdout_mode_from_string(const std::string& s);

// Partition of frames 0..T-1 into fitted (train) and measured (eval) sets.
//   interpolation: keep one frame, hold out the next K, repeat from frame 0
//                  (kept: 0, K+1, 2(K+1), ...); the last frame is always kept.
//   extrapolation: train on the first T-K frames, hold out the last K.
struct HoldoutPlan {
  HoldoutMode mode = HoldoutMode::interpolation;
  std::size_t frames = 0;
  std::size_t window = 3;
  std::vector<std::size_t> train;
  std::vector<std::size_t> eval;
};

// Requires 1 <= K and T > K + 1.
HoldoutPlan make_holdout(std::size_t frames, HoldoutMode mode, std::size_t window);

// Serialized as {"mode", "window", "frames", "train", "eval"}; reading only
// needs mode and window (plus frames unless supplied) and re-derives the sets.
void to_json(nlohmann::json& j, const HoldoutPlan& p);
HoldoutPlan holdout_from_json(const nlohmann::json& j, std::size_t frames);

}  // namespace vidfield
