// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#include "vidfield/vidfield.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "check/suites.hpp"
#include "fit/comparison.hpp"
#include "fit/fit.hpp"
#include "io/checkpoint.hpp"
#include "io/synth.hpp"
#include "io/video.hpp"
#include "metrics/metrics.hpp"
#include "rep/budget.hpp"

using nlohmann::json;
using namespace vidfield;

struct vf_video {
  Video video;
};

struct vf_model {
  std::unique_ptr<Representation> rep;
  json fit = nullptr;
};

namespace {

thread_local std::string g_last_error;

vf_status set_error(vf_status code, std::string message) {
  g_last_error = std::move(message);
  return code;
}

vf_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::io: return VF_ERR_IO;
    case ErrorCode::invalid_argument: return VF_ERR_INVALID_ARGUMENT;
    case ErrorCode::divergence: return VF_ERR_DIVERGENCE;
    case ErrorCode::gradcheck: return VF_ERR_GRADCHECK;
    case ErrorCode::format: return VF_ERR_FORMAT;
    case ErrorCode::checksum: return VF_ERR_CHECKSUM;
    case ErrorCode::version: return VF_ERR_VERSION;
    case ErrorCode::numeric: return VF_ERR_NUMERIC;
    case ErrorCode::internal: return VF_ERR_INTERNAL;
  }
  return VF_ERR_INTERNAL;
}

// Runs `body`, translating exceptions into status codes.
template <typename Body>
vf_status guarded(Body&& body) {
  try {
    body();
    return VF_OK;
  } catch (const Error& e) {
    return set_error(status_of(e.code()), e.what());
  } catch (const json::exception& e) {
    return set_error(VF_ERR_INVALID_ARGUMENT, std::string("invalid JSON: ") + e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return set_error(VF_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return set_error(VF_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(VF_ERR_INTERNAL, e.what());
  }
}

void need(const void* p, const char* what) {
  if (!p) fail(ErrorCode::invalid_argument, std::string(what) + " must not be NULL");
}

json parse(const char* text, const char* what) {
  need(text, what);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::invalid_argument, std::string(what) + ": " + e.what());
  }
}

// Missing or NULL JSON text means an empty object.
json parse_or_empty(const char* text, const char* what) { return text ? parse(text, what) : json::object(); }

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit(char** out, const json& j) {
  if (out) *out = copy_string(j.dump(2));
}

RepConfig rep_config(const char* text) { return parse(text, "representation config").get<RepConfig>(); }

HoldoutPlan holdout(const char* text, std::size_t frames) {
  return holdout_from_json(parse(text, "holdout"), frames);
}

FitConfig fit_config(const char* text) { return parse_or_empty(text, "fit config").get<FitConfig>(); }

json frame_metrics_json(const std::vector<FrameMetric>& ms) {
  json a = json::array();
  for (const auto& m : ms) a.push_back({{"frame", m.index}, {"psnr", m.psnr}, {"ssim", m.ssim}});
  return a;
}

json mean_json(const std::vector<FrameMetric>& ms) {
  double p = 0, s = 0;
  for (const auto& m : ms) {
    p += m.psnr;
    s += m.ssim;
  }
  const double n = ms.empty() ? 1.0 : static_cast<double>(ms.size());
  return {{"psnr", p / n}, {"ssim", s / n}};
}

std::vector<Tensor> render_frames(const Representation& rep, const double* times, std::size_t count) {
  need(times, "times");
  require(count >= 1, "need at least one render time");
  std::vector<Tensor> frames;
  for (std::size_t i = 0; i < count; ++i) {
    require(times[i] >= 0 && times[i] <= 1, "render times must lie in [0, 1]");
    frames.push_back(rep.render_frame(static_cast<real>(times[i])));
  }
  return frames;
}

}  // namespace

extern "C" {

const char* vf_version(void) { return "0.1.0"; }
const char* vf_precision(void) { return kPrecisionName; }
const char* vf_last_error(void) { return g_last_error.c_str(); }
void vf_string_free(char* s) { std::free(s); }

vf_status vf_video_synth(const char* params_json, vf_video** out) {
  return guarded([&] {
    need(out, "out");
    auto params = parse_or_empty(params_json, "synth params").get<io::SynthParams>();
    *out = new vf_video{io::synth_video(params)};
  });
}

vf_status vf_synth_kinds(char** kinds_json) {
  return guarded([&] {
    need(kinds_json, "kinds_json");
    emit(kinds_json, io::synth_kinds());
  });
}

vf_status vf_video_create(size_t frames, size_t height, size_t width, const double* data, vf_video** out) {
  return guarded([&] {
    need(data, "data");
    need(out, "out");
    Video v;
    v.frames = Tensor({frames, height, width, 3});
    for (std::size_t i = 0; i < v.frames.size(); ++i) {
      require(std::isfinite(data[i]), "video data holds a non-finite value at index " + std::to_string(i));
      v.frames[i] = static_cast<real>(std::clamp(data[i], 0.0, 1.0));
    }
    v.validate();
    *out = new vf_video{std::move(v)};
  });
}

vf_status vf_video_load(const char* path, vf_video** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new vf_video{io::load_video(path)};
  });
}

vf_status vf_video_save(const vf_video* video, const char* path) {
  return guarded([&] {
    need(video, "video");
    need(path, "path");
    io::save_video(video->video, path);
  });
}

vf_status vf_video_shape(const vf_video* video, size_t* frames, size_t* height, size_t* width) {
  return guarded([&] {
    need(video, "video");
    if (frames) *frames = video->video.count();
    if (height) *height = video->video.height();
    if (width) *width = video->video.width();
  });
}

vf_status vf_video_data(const vf_video* video, double* out, size_t count) {
  return guarded([&] {
    need(video, "video");
    need(out, "out");
    const Tensor& f = video->video.frames;
    require(count >= f.size(), "output buffer holds " + std::to_string(count) + " values, need " +
                                   std::to_string(f.size()));
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = static_cast<double>(f[i]);
  });
}

void vf_video_free(vf_video* video) { delete video; }

vf_status vf_model_create(const char* rep_config_json, vf_model** out) {
  return guarded([&] {
    need(out, "out");
    *out = new vf_model{make_representation(rep_config(rep_config_json))};
  });
}

vf_status vf_model_load(const char* checkpoint_path, vf_model** out) {
  return guarded([&] {
    need(checkpoint_path, "checkpoint_path");
    need(out, "out");
    io::Checkpoint ck = io::load_checkpoint(checkpoint_path);
    *out = new vf_model{std::move(ck.representation), std::move(ck.fit)};
  });
}

vf_status vf_model_save(const vf_model* model, const char* checkpoint_path) {
  return guarded([&] {
    need(model, "model");
    need(checkpoint_path, "checkpoint_path");
    io::save_checkpoint(*model->rep, checkpoint_path, model->fit);
  });
}

void vf_model_free(vf_model* model) { delete model; }

vf_status vf_model_config(const vf_model* model, char** rep_config_json) {
  return guarded([&] {
    need(model, "model");
    need(rep_config_json, "rep_config_json");
    emit(rep_config_json, model->rep->config());
  });
}

vf_status vf_model_fit_echo(const vf_model* model, char** fit_json) {
  return guarded([&] {
    need(model, "model");
    need(fit_json, "fit_json");
    emit(fit_json, model->fit);
  });
}

vf_status vf_model_param_count(const vf_model* model, size_t* out) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    *out = model->rep->param_count();
  });
}

vf_status vf_model_render(const vf_model* model, const double* times, size_t count, double* out, size_t out_count) {
  return guarded([&] {
    need(model, "model");
    need(out, "out");
    const RepConfig& c = model->rep->config();
    const std::size_t per = c.height * c.width * 3;
    require(out_count >= count * per, "output buffer too small for " + std::to_string(count) + " frames");
    auto frames = render_frames(*model->rep, times, count);
    for (std::size_t i = 0; i < count; ++i)
      for (std::size_t j = 0; j < per; ++j) out[i * per + j] = static_cast<double>(frames[i][j]);
  });
}

vf_status vf_model_render_png(const vf_model* model, const double* times, size_t count, const char* dir) {
  return guarded([&] {
    need(model, "model");
    need(dir, "dir");
    auto frames = render_frames(*model->rep, times, count);
    std::filesystem::create_directories(dir);
    for (std::size_t i = 0; i < count; ++i)
      io::write_png(frames[i], std::filesystem::path(dir) / io::frame_file_name(i));
  });
}

vf_status vf_model_fit(vf_model* model, const vf_video* video, const char* holdout_json, const char* fit_json,
                       char** report_json, char** loss_csv) {
  return guarded([&] {
    need(model, "model");
    need(video, "video");
    const HoldoutPlan plan = holdout(holdout_json, video->video.count());
    const FitConfig cfg = fit_config(fit_json);
    FitReport report = fit(*model->rep, video->video, plan, cfg);
    model->fit = json{{"fit", cfg}, {"holdout", plan}, {"steps_run", report.steps_run}};
    if (report_json) emit(report_json, report);
    if (loss_csv) *loss_csv = copy_string(loss_curve_csv(report));
  });
}

vf_status vf_model_eval(const vf_model* model, const vf_video* video, const char* holdout_json, char** metrics_json) {
  return guarded([&] {
    need(model, "model");
    need(video, "video");
    need(metrics_json, "metrics_json");
    const Video& v = video->video;
    const RepConfig& c = model->rep->config();
    require(v.count() == c.frames && v.height() == c.height && v.width() == c.width,
            "video geometry " + shape_string(v.frames.shape()) + " does not match the model (" +
                std::to_string(c.frames) + "x" + std::to_string(c.height) + "x" + std::to_string(c.width) + ")");
    const HoldoutPlan plan = holdout(holdout_json, v.count());
    auto train = evaluate_frames(*model->rep, v, plan.train);
    auto eval = evaluate_frames(*model->rep, v, plan.eval);
    emit(metrics_json, json{{"schema_version", kReportSchemaVersion},
                            {"holdout", plan},
                            {"train_metrics", frame_metrics_json(train)},
                            {"eval_metrics", frame_metrics_json(eval)},
                            {"mean_train", mean_json(train)},
                            {"mean_eval", mean_json(eval)}});
  });
}

vf_status vf_frame_metrics(const vf_video* a, size_t a_frame, const vf_video* b, size_t b_frame, char** metrics_json) {
  return guarded([&] {
    need(a, "a");
    need(b, "b");
    need(metrics_json, "metrics_json");
    require(a_frame < a->video.count() && b_frame < b->video.count(), "frame index out of range");
    auto m = metrics::evaluate(a->video.frame(a_frame), b->video.frame(b_frame));
    emit(metrics_json, json{{"psnr", m.psnr_db}, {"ssim", m.ssim}});
  });
}

vf_status vf_match_budget(const char* reference_json, const char* family, char** match_json) {
  return guarded([&] {
    need(family, "family");
    need(match_json, "match_json");
    BudgetMatch m = match_param_budget(rep_config(reference_json), family_from_string(family));
    emit(match_json, json{{"config", m.config},
                          {"params", m.params},
                          {"reference_params", m.reference_params},
                          {"relative_error", m.relative_error},
                          {"within_tolerance", m.within_tolerance}});
  });
}

vf_status vf_compare(const vf_video* video, const char* reference_json, const char* configs_json,
                     const char* holdout_json, const char* fit_json, char** table_json, char** table_csv) {
  return guarded([&] {
    need(video, "video");
    const RepConfig reference = rep_config(reference_json);
    std::vector<RepConfig> configs;
    if (configs_json)
      configs = parse(configs_json, "comparison configs").get<std::vector<RepConfig>>();
    else
      configs = comparison_configs(reference, all_families());
    const HoldoutPlan plan = holdout(holdout_json, video->video.count());
    ComparisonTable table = run_comparison(video->video, reference, configs, plan, fit_config(fit_json));
    if (table_json) emit(table_json, table);
    if (table_csv) *table_csv = copy_string(comparison_csv(table));
  });
}

vf_status vf_gradcheck(const char* scope, size_t trials, uint64_t seed, char** report_json) {
  bool passed = true;
  vf_status st = guarded([&] {
    need(scope, "scope");
    SuiteOptions opts;
    opts.trials = trials;
    opts.seed = seed;
    const GradScope s = grad_scope_from_string(scope);
    auto reports = run_gradcheck_suite(s, opts);
    json ops = json::array();
    double worst = 0;
    for (const auto& r : reports) {
      ops.push_back({{"op", r.name},
                     {"trials", r.trials},
                     {"entries", r.entries},
                     {"skipped", r.skipped},
                     {"max_rel_error", r.max_rel_error},
                     {"tolerance", r.tolerance},
                     {"passed", r.passed}});
      worst = std::max(worst, r.max_rel_error);
      passed = passed && r.passed;
    }
    if (report_json)
      emit(report_json, json{{"schema_version", kReportSchemaVersion},
                             {"scope", to_string(s)},
                             {"precision", kPrecisionName},
                             {"trials", trials},
                             {"seed", seed},
                             {"passed", passed},
                             {"max_rel_error", worst},
                             {"ops", ops}});
  });
  if (st != VF_OK) return st;
  return passed ? VF_OK : set_error(VF_ERR_GRADCHECK, std::string("gradient check failed in scope ") + scope);
}

vf_status vf_set_gradient_fault(const char* op, double factor) {
  return guarded([&] {
    if (!op || !*op)
      clear_gradient_fault();
    else
      set_gradient_fault(op, static_cast<real>(factor));
  });
}

}  // extern "C"
