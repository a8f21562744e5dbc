// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "fit/fit.hpp"
#include "rep/budget.hpp"

namespace vidfield {

struct ComparisonRow {
  Family family = Family::triplane;
  std::size_t params = 0;
  double budget_error = 0;
  double ssim = 0;  // mean over eval frames
  double psnr = 0;
  // "ok", "failed" (the fit threw) or "rejected" (outside the ±5% budget).
  std::string status = "ok";
  std::string message;
  RepConfig config;
};

struct ComparisonTable {
  RepConfig reference;
  HoldoutPlan plan;
  FitConfig fit;
  std::vector<ComparisonRow> rows;

  const ComparisonRow* find(Family f) const;
};

// Budget-matched configurations of `families` against the tri-plane
// `reference`.
std::vector<RepConfig> comparison_configs(const RepConfig& reference, const std::vector<Family>& families);

inline const std::vector<Family>& all_families() {
  static const std::vector<Family> f = {Family::posenc, Family::voxel, Family::triplane, Family::triplane_flow};
  return f;
}

// Fits every config with the same plan and seed. Configs whose parameter
// count is outside ±5% of the reference are not fitted; fit failures are
// recorded per row. Fits run concurrently unless cfg.deterministic.
ComparisonTable run_comparison(const Video& video, const RepConfig& reference, const std::vector<RepConfig>& configs,
                               const HoldoutPlan& plan, const FitConfig& cfg);

void to_json(nlohmann::json& j, const ComparisonTable& t);
// family,params,budget_error,ssim,psnr,status
std::string comparison_csv(const ComparisonTable& t);

}  // namespace vidfield
