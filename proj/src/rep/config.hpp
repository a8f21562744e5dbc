// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "core/common.hpp"

namespace vidfield {

enum class Family { triplane, voxel, posenc, triplane_flow };
enum class PlaneCombine { concat, sum };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

// Everything needed to build and initialize a representation. JSON keys are
// the field names below; `family` and `plane_combine` are strings.
struct RepConfig {
  Family family = Family::triplane;
  // Video geometry T x H x W.
  std::size_t frames = 64;
  std::size_t height = 64;
  std::size_t width = 64;
  std::uint64_t seed = 0;
  std::string precision = kPrecisionName;

  // Tri-plane: three N x N x C planes. Also the global-plane resolution of
  // the flow family.
  std::size_t plane_resolution = 32;
  std::size_t plane_channels = 8;
  PlaneCombine plane_combine = PlaneCombine::concat;

  // Dense voxel grid D x D x D x C_v.
  std::size_t voxel_resolution = 16;
  std::size_t voxel_channels = 8;

  // Positional-encoding MLP: L frequencies, `mlp_depth` hidden layers.
  std::size_t num_frequencies = 8;
  std::size_t mlp_hidden = 64;
  std::size_t mlp_depth = 4;

  // Convolutional frame decoder width C_h.
  std::size_t decoder_hidden = 32;

  // Tri-plane + flow.
  std::size_t global_channels = 8;    // C_G
  std::size_t motion_channels = 4;    // C_m
  std::size_t motion_resolution = 0;  // N_m; 0 means plane_resolution
  std::size_t flow_hidden = 32;       // W_h
  std::size_t feature_frames = 0;     // T_f; 0 means frames

  std::size_t effective_motion_resolution() const {
    return motion_resolution ? motion_resolution : plane_resolution;
  }
  std::size_t effective_feature_frames() const { return feature_frames ? feature_frames : frames; }

  // Throws invalid_argument describing the first violated constraint.
  void validate() const;

  bool operator==(const RepConfig&) const = default;
};

void to_json(nlohmann::json& j, const RepConfig& c);
// Missing keys keep their defaults; unknown keys are rejected.
void from_json(const nlohmann::json& j, RepConfig& c);

// Closed-form trainable parameter counts.
std::size_t decoder_param_count(std::size_t in_channels, std::size_t hidden);
std::size_t param_count(const RepConfig& c);

}  // namespace vidfield
