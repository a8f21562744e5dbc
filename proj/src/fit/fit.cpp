// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#include "fit/fit.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "core/ops.hpp"
#include "metrics/metrics.hpp"

namespace vidfield {

void FitConfig::validate() const {
  require(batch >= 1, "fit batch must be >= 1");
  require(adam.lr > 0, "learning rate must be > 0");
  require(adam.beta1 >= 0 && adam.beta1 < 1 && adam.beta2 >= 0 && adam.beta2 < 1, "Adam betas must be in [0, 1)");
  require(adam.epsilon > 0, "Adam epsilon must be > 0");
  require(precision == kPrecisionName,
          "fit precision '" + precision + "' does not match this build (" + kPrecisionName + ")");
}

void to_json(nlohmann::json& j, const FitConfig& c) {
  j = nlohmann::json{{"steps", c.steps},       {"batch", c.batch},
                     {"lr", c.adam.lr},        {"beta1", c.adam.beta1},
                     {"beta2", c.adam.beta2},  {"epsilon", c.adam.epsilon},
                     {"seed", c.seed},         {"precision", c.precision},
                     {"patience", c.patience}, {"deterministic", c.deterministic}};
}

void from_json(const nlohmann::json& j, FitConfig& c) {
  require(j.is_object(), "fit config must be a JSON object");
  static const char* known[] = {"steps", "batch",     "lr",       "beta1",        "beta2",
                                "epsilon", "seed",    "precision", "patience", "deterministic"};
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    require(ok, "unknown fit config key '" + key + "'");
  }
  try {
    c.steps = j.value("steps", c.steps);
    c.batch = j.value("batch", c.batch);
    c.adam.lr = j.value("lr", c.adam.lr);
    c.adam.beta1 = j.value("beta1", c.adam.beta1);
    c.adam.beta2 = j.value("beta2", c.adam.beta2);
    c.adam.epsilon = j.value("epsilon", c.adam.epsilon);
    c.seed = j.value("seed", c.seed);
    c.precision = j.value("precision", c.precision);
    c.patience = j.value("patience", c.patience);
    c.deterministic = j.value("deterministic", c.deterministic);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::invalid_argument, std::string("fit config: ") + e.what());
  }
}

namespace {

nlohmann::json metrics_json(const std::vector<FrameMetric>& ms) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& m : ms) a.push_back({{"frame", m.index}, {"psnr", m.psnr}, {"ssim", m.ssim}});
  return a;
}

void mean_of(const std::vector<FrameMetric>& ms, double& psnr, double& ssim) {
  psnr = ssim = 0;
  if (ms.empty()) return;
  for (const auto& m : ms) {
    psnr += m.psnr;
    ssim += m.ssim;
  }
  psnr /= static_cast<double>(ms.size());
  ssim /= static_cast<double>(ms.size());
}

}  // namespace

void to_json(nlohmann::json& j, const FitReport& r) {
  j = nlohmann::json{{"schema_version", kReportSchemaVersion},
                     {"loss", r.loss},
                     {"train_metrics", metrics_json(r.train)},
                     {"eval_metrics", metrics_json(r.eval)},
                     {"mean_train_psnr", r.mean_train_psnr},
                     {"mean_train_ssim", r.mean_train_ssim},
                     {"mean_eval_psnr", r.mean_eval_psnr},
                     {"mean_eval_ssim", r.mean_eval_ssim},
                     {"params", r.params},
                     {"steps_run", r.steps_run},
                     {"early_stopped", r.early_stopped},
                     {"wall_clock_seconds", r.wall_clock_seconds},
                     {"representation", r.representation},
                     {"fit", r.fit},
                     {"holdout", r.plan}};
}

std::string loss_curve_csv(const FitReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "step,loss\n";
  for (std::size_t i = 0; i < r.loss.size(); ++i) os << i << ',' << r.loss[i] << '\n';
  return os.str();
}

Var mse_loss(Var pred, const Tensor& target) {
  require(pred.shape() == target.shape(), "mse_loss: prediction " + shape_string(pred.shape()) +
                                              " and target " + shape_string(target.shape()) + " differ");
  Var diff = ops::sub(pred, pred.tape().constant(target));
  return ops::mean(ops::square(diff));
}

std::vector<FrameMetric> evaluate_frames(const Representation& rep, const Video& video,
                                         const std::vector<std::size_t>& indices) {
  constexpr std::size_t kChunk = 4;
  std::vector<FrameMetric> out;
  for (std::size_t start = 0; start < indices.size(); start += kChunk) {
    const std::size_t end = std::min(indices.size(), start + kChunk);
    std::vector<real> times;
    for (std::size_t i = start; i < end; ++i) times.push_back(frame_time(indices[i], video.count()));
    Tape tape;
    auto frames = rep.render(tape, times);
    for (std::size_t i = start; i < end; ++i) {
      const Tensor target = video.frame(indices[i]);
      const Tensor& pred = frames[i - start].value();
      out.push_back({indices[i], metrics::psnr(pred, target), metrics::ssim(pred, target)});
    }
  }
  return out;
}

FitReport fit(Representation& rep, const Video& video, const HoldoutPlan& plan, const FitConfig& cfg) {
  cfg.validate();
  video.validate();
  const RepConfig& rc = rep.config();
  require(video.count() == plan.frames, "fit: video has " + std::to_string(video.count()) +
                                            " frames but the holdout plan expects " + std::to_string(plan.frames));
  require(video.count() == rc.frames && video.height() == rc.height && video.width() == rc.width,
          "fit: video geometry " + shape_string(video.frames.shape()) + " does not match the representation (" +
              std::to_string(rc.frames) + "x" + std::to_string(rc.height) + "x" + std::to_string(rc.width) + ")");
  require(!plan.train.empty(), "fit: holdout plan has no train frames");

  const auto started = std::chrono::steady_clock::now();
  FitReport report;
  report.representation = rc;
  report.fit = cfg;
  report.plan = plan;
  report.params = rep.param_count();

  // Targets are copied up front for the train set only.
  std::vector<Tensor> targets;
  for (std::size_t k : plan.train) targets.push_back(video.frame(k));

  ParameterSet& params = rep.parameters();
  Adam adam(cfg.adam);
  Pcg32 rng(cfg.seed, 0x5851f42d4c957f2dULL);
  std::vector<std::size_t> order(plan.train.size());
  const std::size_t batch = std::min(cfg.batch, plan.train.size());
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_step = 0;
  double last_finite = std::numeric_limits<double>::quiet_NaN();

  for (std::size_t step = 0; step < cfg.steps; ++step) {
    // Partial Fisher-Yates: `batch` distinct train frames.
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = 0; i < batch; ++i) {
      const std::size_t j = i + rng.below(static_cast<std::uint32_t>(order.size() - i));
      std::swap(order[i], order[j]);
    }
    std::vector<real> times;
    for (std::size_t i = 0; i < batch; ++i) times.push_back(frame_time(plan.train[order[i]], video.count()));

    double loss_value = 0;
    try {
      Tape tape;
      auto frames = rep.render(tape, times);
      Var total = mse_loss(frames[0], targets[order[0]]);
      for (std::size_t i = 1; i < batch; ++i) total = ops::add(total, mse_loss(frames[i], targets[order[i]]));
      Var loss = ops::mul(total, real(1) / static_cast<real>(batch));
      loss_value = loss.value()[0];
      tape.backward(loss);
      params.zero_grad();
      tape.accumulate_grads(params);
      adam.step(params);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::numeric) throw;
      std::ostringstream os;
      os.precision(10);
      os << "fit diverged at step " << step << " (" << e.what() << "); last finite loss " << last_finite;
      fail(ErrorCode::divergence, os.str());
    }
    last_finite = loss_value;
    report.loss.push_back(loss_value);
    ++report.steps_run;
    if (loss_value < best) {
      best = loss_value;
      best_step = step;
    } else if (cfg.patience > 0 && step - best_step >= cfg.patience) {
      report.early_stopped = true;
      break;
    }
  }

  report.train = evaluate_frames(rep, video, plan.train);
  report.eval = evaluate_frames(rep, video, plan.eval);
  mean_of(report.train, report.mean_train_psnr, report.mean_train_ssim);
  mean_of(report.eval, report.mean_eval_psnr, report.mean_eval_ssim);
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

}  // namespace vidfield
