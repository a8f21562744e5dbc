// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
//
// C interface of the vidfield library. Every function returns a vf_status;
// on failure vf_last_error() describes the problem (per thread, valid until
// the next failing call on that thread). Strings returned through char**
// are owned by the caller and released with vf_string_free. Configurations
// and reports travel as JSON text; the schemas are documented in README.md.
#ifndef VIDFIELD_VIDFIELD_H_
#define VIDFIELD_VIDFIELD_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define VF_API __declspec(dllexport)
#else
#define VF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vf_status {
  VF_OK = 0,
  VF_ERR_IO = 1,
  VF_ERR_INVALID_ARGUMENT = 2,
  VF_ERR_DIVERGENCE = 3,
  VF_ERR_GRADCHECK = 4,
  VF_ERR_FORMAT = 5,
  VF_ERR_CHECKSUM = 6,
  VF_ERR_VERSION = 7,
  VF_ERR_NUMERIC = 8,
  VF_ERR_INTERNAL = 9
} vf_status;

typedef struct vf_video vf_video;
typedef struct vf_model vf_model;

VF_API const char* vf_version(void);
// "f32" or "f64": the tensor precision this library was built with.
VF_API const char* vf_precision(void);
VF_API const char* vf_last_error(void);
VF_API void vf_string_free(char* s);

// Videos: T x H x W x 3 values in [0, 1], row-major.
VF_API vf_status vf_video_synth(const char* params_json, vf_video** out);
// JSON array of the synthetic video kinds.
VF_API vf_status vf_synth_kinds(char** kinds_json);
VF_API vf_status vf_video_create(size_t frames, size_t height, size_t width, const double* data, vf_video** out);
VF_API vf_status vf_video_load(const char* path, vf_video** out);
// `path` ending in .vtf writes one tensor file, anything else a directory of
// frame_NNNNN.png files.
VF_API vf_status vf_video_save(const vf_video* video, const char* path);
VF_API vf_status vf_video_shape(const vf_video* video, size_t* frames, size_t* height, size_t* width);
// Copies all T*H*W*3 values into `out` (capacity `count`).
VF_API vf_status vf_video_data(const vf_video* video, double* out, size_t count);
VF_API void vf_video_free(vf_video* video);

// Models wrap one representation plus the echo of its last fit.
VF_API vf_status vf_model_create(const char* rep_config_json, vf_model** out);
VF_API vf_status vf_model_load(const char* checkpoint_path, vf_model** out);
VF_API vf_status vf_model_save(const vf_model* model, const char* checkpoint_path);
VF_API void vf_model_free(vf_model* model);
VF_API vf_status vf_model_config(const vf_model* model, char** rep_config_json);
// The fit echo stored with the model ("null" before any fit).
VF_API vf_status vf_model_fit_echo(const vf_model* model, char** fit_json);
VF_API vf_status vf_model_param_count(const vf_model* model, size_t* out);

// Renders frames at normalized times in [0, 1]. The buffer variant writes
// count*H*W*3 values; the directory variant writes frame_NNNNN.png per time.
VF_API vf_status vf_model_render(const vf_model* model, const double* times, size_t count, double* out,
                                 size_t out_count);
VF_API vf_status vf_model_render_png(const vf_model* model, const double* times, size_t count, const char* dir);

// Fits the model in place. holdout_json: {"mode": ..., "window": K}.
// On success *report_json holds the FitReport and *loss_csv the loss curve
// (either pointer may be NULL). Divergence returns VF_ERR_DIVERGENCE with the
// last finite loss in vf_last_error().
VF_API vf_status vf_model_fit(vf_model* model, const vf_video* video, const char* holdout_json, const char* fit_json,
                              char** report_json, char** loss_csv);
// Per-frame and mean PSNR/SSIM on the train and eval frames of a plan.
VF_API vf_status vf_model_eval(const vf_model* model, const vf_video* video, const char* holdout_json,
                               char** metrics_json);

// {"psnr": ..., "ssim": ...} of two equally shaped videos' frames `a_frame`
// and `b_frame`.
VF_API vf_status vf_frame_metrics(const vf_video* a, size_t a_frame, const vf_video* b, size_t b_frame,
                                  char** metrics_json);

// Budget-matched configuration of `family` against a tri-plane reference.
// The result has {"config", "params", "reference_params", "relative_error",
// "within_tolerance"}.
VF_API vf_status vf_match_budget(const char* reference_json, const char* family, char** match_json);

// Runs the family comparison. configs_json may be NULL (all four families
// matched against the reference) or a JSON array of representation configs.
VF_API vf_status vf_compare(const vf_video* video, const char* reference_json, const char* configs_json,
                            const char* holdout_json, const char* fit_json, char** table_json, char** table_csv);

// Runs one finite-difference suite ("primitives", "warp", "end2end").
// Returns VF_ERR_GRADCHECK when any op exceeds its tolerance; the report is
// filled either way.
VF_API vf_status vf_gradcheck(const char* scope, size_t trials, uint64_t seed, char** report_json);

// Test hook: scales the gradient of every node recorded by `op` by `factor`
// during backward passes. A NULL or empty op clears it.
VF_API vf_status vf_set_gradient_fault(const char* op, double factor);

#ifdef __cplusplus
}
#endif

#endif  // VIDFIELD_VIDFIELD_H_
