// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fit/adam.hpp"
#include "fit/holdout.hpp"
#include "io/video.hpp"
#include "rep/representation.hpp"

namespace vidfield {

inline constexpr int kReportSchemaVersion = 1;

struct FitConfig {
  std::size_t steps = 5000;
  std::size_t batch = 4;  // train frames rendered per step
  AdamHyper adam;
  std::uint64_t seed = 0;
  std::string precision = kPrecisionName;
  // Stop once the best training loss has not improved for this many steps
  // (0 disables).
  std::size_t patience = 0;
  bool deterministic = true;

  void validate() const;
};

// JSON keys: steps, batch, lr, beta1, beta2, epsilon, seed, precision,
// patience, deterministic.
void to_json(nlohmann::json& j, const FitConfig& c);
void from_json(const nlohmann::json& j, FitConfig& c);

struct FrameMetric {
  std::size_t index = 0;
  double psnr = 0;
  double ssim = 0;
};

struct FitReport {
  std::vector<double> loss;
  std::vector<FrameMetric> train;
  std::vector<FrameMetric> eval;
  double mean_train_psnr = 0, mean_train_ssim = 0;
  double mean_eval_psnr = 0, mean_eval_ssim = 0;
  std::size_t params = 0;
  std::size_t steps_run = 0;
  bool early_stopped = false;
  double wall_clock_seconds = 0;
  RepConfig representation;
  FitConfig fit;
  HoldoutPlan plan;
};

void to_json(nlohmann::json& j, const FitReport& r);
// step,loss rows with a header line.
std::string loss_curve_csv(const FitReport& r);

// Mean squared error between a rendered frame and a fixed target.
Var mse_loss(Var pred, const Tensor& target);

// Per-frame PSNR/SSIM of `rep` against `video` for the listed frames.
std::vector<FrameMetric> evaluate_frames(const Representation& rep, const Video& video,
                                         const std::vector<std::size_t>& indices);

// Fits `rep` to the train frames of `plan` with Adam on the batch MSE; eval
// frames are only read for the final metrics. Throws ErrorCode::divergence
// (with the last finite loss) when the loss or gradients stop being finite.
FitReport fit(Representation& rep, const Video& video, const HoldoutPlan& plan, const FitConfig& cfg);

}  // namespace vidfield
