// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#include "rep/triplane.hpp"

#include <algorithm>

namespace vidfield {

namespace {
real clamp01(real v) { return std::clamp(v, real(0), real(1)); }
}  // namespace

TriPlaneRep::TriPlaneRep(RepConfig config) : Representation(std::move(config)) {
  const std::size_t n = config_.plane_resolution, c = config_.plane_channels;
  const std::size_t width = config_.plane_combine == PlaneCombine::concat ? 3 * c : c;
  decoder_ = FrameDecoder("decoder", width, config_.decoder_hidden);
  Pcg32 rng(config_.seed);
  params_.add("plane_xy", normal_tensor({n, n, c}, 0.1, rng));
  params_.add("plane_xt", normal_tensor({n, n, c}, 0.1, rng));
  params_.add("plane_yt", normal_tensor({n, n, c}, 0.1, rng));
  decoder_.init(params_, rng);
}

Var TriPlaneRep::combine(std::vector<Var> parts) const {
  if (config_.plane_combine == PlaneCombine::concat) return ops::concat_last(parts);
  return ops::add(ops::add(parts[0], parts[1]), parts[2]);
}

Var TriPlaneRep::triplane_feature(Tape& tape, real x, real y, real t) const {
  const real s = static_cast<real>(config_.plane_resolution - 1);
  x = clamp01(x) * s;
  y = clamp01(y) * s;
  t = clamp01(t) * s;
  Var xy = ops::bilinear_sample2d(tape.param(params_.get("plane_xy")), x, y);
  Var xt = ops::bilinear_sample2d(tape.param(params_.get("plane_xt")), x, t);
  Var yt = ops::bilinear_sample2d(tape.param(params_.get("plane_yt")), y, t);
  return combine({xy, xt, yt});
}

Tensor TriPlaneRep::triplane_feature(real x, real y, real t) const {
  Tape tape;
  return triplane_feature(tape, x, y, t).value();
}

Var TriPlaneRep::feature_frame(Tape& tape, real t, std::size_t hf, std::size_t wf) const {
  require(hf >= 2 && wf >= 2, "feature_frame: frame extent must be >= 2");
  const std::size_t n = config_.plane_resolution;
  const real s = static_cast<real>(n - 1);
  const real pt = clamp01(t) * s;
  Tensor xy = pixel_grid_coords(hf, wf, n, n);
  Tensor xt(xy.shape()), yt(xy.shape());
  for (std::size_t p = 0; p < hf * wf; ++p) {
    xt[2 * p] = xy[2 * p];
    xt[2 * p + 1] = pt;
    yt[2 * p] = xy[2 * p + 1];
    yt[2 * p + 1] = pt;
  }
  Var fxy = ops::bilinear_sample2d(tape.param(params_.get("plane_xy")), tape.constant(std::move(xy)));
  Var fxt = ops::bilinear_sample2d(tape.param(params_.get("plane_xt")), tape.constant(std::move(xt)));
  Var fyt = ops::bilinear_sample2d(tape.param(params_.get("plane_yt")), tape.constant(std::move(yt)));
  Var feat = combine({fxy, fxt, fyt});
  return ops::reshape(feat, {hf, wf, feature_width()});
}

std::vector<Var> TriPlaneRep::render(Tape& tape, std::span<const real> times) const {
  std::vector<Var> frames;
  frames.reserve(times.size());
  for (real t : times)
    frames.push_back(decoder_.decode(tape, params_, feature_frame(tape, t, config_.height, config_.width)));
  return frames;
}

}  // namespace vidfield
