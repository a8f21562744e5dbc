// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "io/video.hpp"

namespace vidfield::io {

struct SynthParams {
  std::string kind = "translating_texture";
  std::size_t frames = 32;
  std::size_t height = 64;
  std::size_t width = 64;
  std::uint64_t seed = 0;
  // Pixels per frame for the translating kinds (sub-pixel values are
  // rendered with bilinear anti-aliasing).
  double velocity_x = 1.0;
  double velocity_y = 0.5;
  // Radians per frame for rotating_bar.
  double angular_velocity = 0.1;
};

void to_json(nlohmann::json& j, const SynthParams& p);
void from_json(const nlohmann::json& j, SynthParams& p);

// constant, translating_square, translating_texture, rotating_bar,
// two_objects_crossing
const std::vector<std::string>& synth_kinds();

// Pure function of the parameters.
Video synth_video(const SynthParams& params);

}  // namespace vidfield::io
