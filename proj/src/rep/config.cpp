// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#include "rep/config.hpp"

#include <set>

namespace vidfield {

std::string to_string(Family f) {
  switch (f) {
    case Family::triplane: return "triplane";
    case Family::voxel: return "voxel";
    case Family::posenc: return "posenc";
    case Family::triplane_flow: return "triplane_flow";
  }
  return "?";
}

Family family_from_string(const std::string& s) {
  if (s == "triplane") return Family::triplane;
  if (s == "voxel") return Family::voxel;
  if (s == "posenc") return Family::posenc;
  if (s == "triplane_flow") return Family::triplane_flow;
  fail(ErrorCode::invalid_argument,
       "unknown representation family '" + s + "' (expected triplane, voxel, posenc, triplane_flow)");
}

void RepConfig::validate() const {
  require(frames >= 2, "frames must be >= 2");
  require(height >= 2 && width >= 2, "height and width must be >= 2");
  require(precision == kPrecisionName,
          "config precision '" + precision + "' does not match this build (" + kPrecisionName + ")");
  require(decoder_hidden >= 1, "decoder_hidden must be >= 1");
  switch (family) {
    case Family::triplane:
      require(plane_resolution >= 2, "plane_resolution must be >= 2");
      require(plane_channels >= 1, "plane_channels must be >= 1");
      break;
    case Family::voxel:
      require(voxel_resolution >= 2, "voxel_resolution must be >= 2");
      require(voxel_channels >= 1, "voxel_channels must be >= 1");
      break;
    case Family::posenc:
      require(num_frequencies >= 1, "num_frequencies must be >= 1");
      require(mlp_hidden >= 1 && mlp_depth >= 1, "mlp_hidden and mlp_depth must be >= 1");
      break;
    case Family::triplane_flow:
      require(plane_resolution >= 2, "plane_resolution must be >= 2");
      require(effective_motion_resolution() >= 2, "motion_resolution must be >= 2");
      require(global_channels >= 1 && motion_channels >= 1 && flow_hidden >= 1,
              "global_channels, motion_channels and flow_hidden must be >= 1");
      require(effective_feature_frames() >= 2, "feature_frames must be >= 2");
      break;
  }
}

void to_json(nlohmann::json& j, const RepConfig& c) {
  j = nlohmann::json{
      {"family", to_string(c.family)},
      {"frames", c.frames},
      {"height", c.height},
      {"width", c.width},
      {"seed", c.seed},
      {"precision", c.precision},
      {"plane_resolution", c.plane_resolution},
      {"plane_channels", c.plane_channels},
      {"plane_combine", c.plane_combine == PlaneCombine::concat ? "concat" : "sum"},
      {"voxel_resolution", c.voxel_resolution},
      {"voxel_channels", c.voxel_channels},
      {"num_frequencies", c.num_frequencies},
      {"mlp_hidden", c.mlp_hidden},
      {"mlp_depth", c.mlp_depth},
      {"decoder_hidden", c.decoder_hidden},
      {"global_channels", c.global_channels},
      {"motion_channels", c.motion_channels},
      {"motion_resolution", c.motion_resolution},
      {"flow_hidden", c.flow_hidden},
      {"feature_frames", c.feature_frames},
  };
}

void from_json(const nlohmann::json& j, RepConfig& c) {
  require(j.is_object(), "representation config must be a JSON object");
  static const std::set<std::string> known = {
      "family", "frames", "height", "width", "seed", "precision", "plane_resolution", "plane_channels",
      "plane_combine", "voxel_resolution", "voxel_channels", "num_frequencies", "mlp_hidden", "mlp_depth",
      "decoder_hidden", "global_channels", "motion_channels", "motion_resolution", "flow_hidden", "feature_frames"};
  for (const auto& [key, _] : j.items())
    require(known.count(key) > 0, "unknown representation config key '" + key + "'");

  try {
    if (j.contains("family")) c.family = family_from_string(j.at("family").get<std::string>());
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
    };
    get("frames", c.frames);
    get("height", c.height);
    get("width", c.width);
    get("seed", c.seed);
    get("precision", c.precision);
    get("plane_resolution", c.plane_resolution);
    get("plane_channels", c.plane_channels);
    if (j.contains("plane_combine")) {
      auto s = j.at("plane_combine").get<std::string>();
      require(s == "concat" || s == "sum", "plane_combine must be 'concat' or 'sum'");
      c.plane_combine = s == "concat" ? PlaneCombine::concat : PlaneCombine::sum;
    }
    get("voxel_resolution", c.voxel_resolution);
    get("voxel_channels", c.voxel_channels);
    get("num_frequencies", c.num_frequencies);
    get("mlp_hidden", c.mlp_hidden);
    get("mlp_depth", c.mlp_depth);
    get("decoder_hidden", c.decoder_hidden);
    get("global_channels", c.global_channels);
    get("motion_channels", c.motion_channels);
    get("motion_resolution", c.motion_resolution);
    get("flow_hidden", c.flow_hidden);
    get("feature_frames", c.feature_frames);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::invalid_argument, std::string("representation config: ") + e.what());
  }
}

std::size_t decoder_param_count(std::size_t in_channels, std::size_t hidden) {
  return 9 * in_channels * hidden + hidden + 9 * hidden * hidden + hidden + hidden * 3 + 3;
}

std::size_t param_count(const RepConfig& c) {
  switch (c.family) {
    case Family::triplane: {
      const std::size_t n = c.plane_resolution, ch = c.plane_channels;
      const std::size_t feat = c.plane_combine == PlaneCombine::concat ? 3 * ch : ch;
      return 3 * n * n * ch + decoder_param_count(feat, c.decoder_hidden);
    }
    case Family::voxel: {
      const std::size_t d = c.voxel_resolution;
      return d * d * d * c.voxel_channels + decoder_param_count(c.voxel_channels, c.decoder_hidden);
    }
    case Family::posenc: {
      const std::size_t in = 6 * c.num_frequencies + 3, w = c.mlp_hidden;
      return (in + 1) * w + (c.mlp_depth - 1) * (w + 1) * w + (w + 1) * 3;
    }
    case Family::triplane_flow: {
      const std::size_t n = c.plane_resolution, nm = c.effective_motion_resolution();
      const std::size_t cm = c.motion_channels, wh = c.flow_hidden;
      return n * n * c.global_channels + 3 * nm * nm * cm + (3 * cm + 1) * wh + (wh + 1) * 5 +
             decoder_param_count(c.global_channels, c.decoder_hidden);
    }
  }
  return 0;
}

}  // namespace vidfield
