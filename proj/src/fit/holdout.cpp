// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#include "fit/holdout.hpp"

#include "core/common.hpp"

namespace vidfield {

std::string to_string(HoldoutMode m) { return m == HoldoutMode::interpolation ? "interpolation" : "extrapolation"; }

HoldoutMode holdout_mode_from_string(const std::string& s) {
  if (s == "interpolation") return HoldoutMode::interpolation;
  if (s == "extrapolation") return HoldoutMode::extrapolation;
  fail(ErrorCode::invalid_argument, "unknown holdout mode '" + s + "' (expected interpolation or extrapolation)");
}

HoldoutPlan make_holdout(std::size_t frames, HoldoutMode mode, std::size_t window) {
  require(window >= 1, "holdout window must be >= 1");
  require(window < frames, "holdout window " + std::to_string(window) + " must be smaller than the frame count " +
                               std::to_string(frames));
  require(frames > window + 1, "holdout needs more than window + 1 frames");
  HoldoutPlan plan{mode, frames, window, {}, {}};
  for (std::size_t k = 0; k < frames; ++k) {
    bool keep = false;
    if (mode == HoldoutMode::interpolation)
      keep = k % (window + 1) == 0 || k == frames - 1;
    else
      keep = k < frames - window;
    (keep ? plan.train : plan.eval).push_back(k);
  }
  return plan;
}

void to_json(nlohmann::json& j, const HoldoutPlan& p) {
  j = nlohmann::json{{"mode", to_string(p.mode)}, {"window", p.window}, {"frames", p.frames},
                     {"train", p.train},         {"eval", p.eval}};
}

HoldoutPlan holdout_from_json(const nlohmann::json& j, std::size_t frames) {
  try {
    const auto mode = holdout_mode_from_string(j.value("mode", std::string("interpolation")));
    const auto window = j.value("window", std::size_t{3});
    if (frames == 0) frames = j.at("frames").get<std::size_t>();
    return make_holdout(frames, mode, window);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::invalid_argument, std::string("holdout plan: ") + e.what());
  }
}

}  // namespace vidfield
