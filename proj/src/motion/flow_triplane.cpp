// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#include "motion/flow_triplane.hpp"

#include <algorithm>
#include <cmath>

#include "motion/warp.hpp"

namespace vidfield {

FlowTriPlaneRep::FlowTriPlaneRep(RepConfig config) : Representation(std::move(config)) {
  const std::size_t n = config_.plane_resolution, nm = config_.effective_motion_resolution();
  const std::size_t cg = config_.global_channels, cm = config_.motion_channels, wh = config_.flow_hidden;
  decoder_ = FrameDecoder("decoder", cg, config_.decoder_hidden);
  Pcg32 rng(config_.seed);
  params_.add("global_plane", normal_tensor({n, n, cg}, 0.1, rng));
  params_.add("motion_xy", normal_tensor({nm, nm, cm}, 0.1, rng));
  params_.add("motion_xt", normal_tensor({nm, nm, cm}, 0.1, rng));
  params_.add("motion_yt", normal_tensor({nm, nm, cm}, 0.1, rng));
  params_.add("flow.fc1.weight", normal_tensor({3 * cm, wh}, std::sqrt(2.0 / static_cast<double>(3 * cm)), rng));
  params_.add("flow.fc1.bias", Tensor({wh}));
  params_.add("flow.fc2.weight", normal_tensor({wh, 5}, std::sqrt(2.0 / static_cast<double>(wh)), rng));
  params_.add("flow.fc2.bias", Tensor({5}));
  decoder_.init(params_, rng);
}

FlowFieldVars FlowTriPlaneRep::decode_flow(Tape& tape, std::size_t step) const {
  const std::size_t tf = feature_frames();
  require(step < tf, "decode_flow: step " + std::to_string(step) + " outside [0, " + std::to_string(tf) + ")");
  const std::size_t n = grid(), nm = config_.effective_motion_resolution();
  const real pt = static_cast<real>(step * (nm - 1)) / static_cast<real>(tf - 1);
  Tensor xy = pixel_grid_coords(n, n, nm, nm);
  Tensor xt(xy.shape()), yt(xy.shape());
  for (std::size_t p = 0; p < n * n; ++p) {
    xt[2 * p] = xy[2 * p];
    xt[2 * p + 1] = pt;
    yt[2 * p] = xy[2 * p + 1];
    yt[2 * p + 1] = pt;
  }
  Var fxy = ops::bilinear_sample2d(tape.param(params_.get("motion_xy")), tape.constant(std::move(xy)));
  Var fxt = ops::bilinear_sample2d(tape.param(params_.get("motion_xt")), tape.constant(std::move(xt)));
  Var fyt = ops::bilinear_sample2d(tape.param(params_.get("motion_yt")), tape.constant(std::move(yt)));
  Var motion = ops::concat_last({fxy, fxt, fyt});

  auto p = [&](const char* name) { return tape.param(params_.get(name)); };
  Var hidden = ops::leaky_relu(ops::add_bias(ops::matmul(motion, p("flow.fc1.weight")), p("flow.fc1.bias")));
  Var out = ops::add_bias(ops::matmul(hidden, p("flow.fc2.weight")), p("flow.fc2.bias"));
  return FlowFieldVars{
      ops::reshape(ops::slice_last(out, 0, 2), {n, n, 2}),
      ops::reshape(ops::slice_last(out, 2, 4), {n, n, 2}),
      ops::reshape(ops::sigmoid(ops::slice_last(out, 4, 5)), {n, n, 1}),
  };
}

FlowField FlowTriPlaneRep::decode_flow(std::size_t step) const {
  Tape tape;
  FlowFieldVars f = decode_flow(tape, step);
  return FlowField{f.local.value(), f.global.value(), f.mask.value()};
}

std::vector<Var> FlowTriPlaneRep::appearance_recurrence(Tape& tape, std::size_t last) const {
  require(last < feature_frames(), "appearance_recurrence: slice index out of range");
  const std::size_t cg = config_.global_channels;
  Var global = tape.param(params_.get("global_plane"));
  std::vector<Var> slices{global};
  for (std::size_t s = 1; s <= last; ++s) {
    FlowFieldVars f = decode_flow(tape, s);
    Var from_global = forward_warp(global, f.global);
    Var from_local = forward_warp(slices.back(), f.local);
    Var m = ops::broadcast_last(f.mask, cg);
    slices.push_back(ops::add(ops::mul(m, from_global), ops::mul(ops::rsub(1, m), from_local)));
  }
  return slices;
}

AppearanceVolume FlowTriPlaneRep::appearance_recurrence() const {
  Tape tape;
  AppearanceVolume vol;
  for (Var v : appearance_recurrence(tape, feature_frames() - 1)) vol.slices.push_back(v.value());
  return vol;
}

FlowTriPlaneRep::SliceBlend FlowTriPlaneRep::locate(real t) const {
  const std::size_t tf = feature_frames();
  const real s = std::clamp(t, real(0), real(1)) * static_cast<real>(tf - 1);
  const real nearest = std::round(s);
  // Frame times k / (T - 1) land on slices up to rounding.
  if (std::abs(s - nearest) < real(kSinglePrecision ? 1e-4 : 1e-9)) {
    auto k = static_cast<std::size_t>(nearest);
    return {k, k, 0};
  }
  auto lo = static_cast<std::size_t>(std::floor(s));
  return {lo, std::min(lo + 1, tf - 1), s - static_cast<real>(lo)};
}

Var FlowTriPlaneRep::feature_frame(std::span<const Var> slices, real t) const {
  const SliceBlend b = locate(t);
  require(b.hi < slices.size(), "feature_frame: appearance volume too short for t");
  Var frame = slices[b.lo];
  if (b.hi != b.lo) {
    const real w[2] = {1 - b.upper, b.upper};
    frame = ops::weighted_sum({slices[b.lo], slices[b.hi]}, w);
  }
  const std::size_t n = grid(), h = config_.height, wd = config_.width;
  if (h == n && wd == n) return frame;
  Tape& tape = frame.tape();
  Var resampled = ops::bilinear_sample2d(frame, tape.constant(pixel_grid_coords(h, wd, n, n)));
  return ops::reshape(resampled, {h, wd, config_.global_channels});
}

std::vector<Var> FlowTriPlaneRep::render(Tape& tape, std::span<const real> times) const {
  std::size_t last = 0;
  for (real t : times) last = std::max(last, locate(t).hi);
  std::vector<Var> slices = appearance_recurrence(tape, last);
  std::vector<Var> frames;
  frames.reserve(times.size());
  for (real t : times) frames.push_back(decoder_.decode(tape, params_, feature_frame(slices, t)));
  return frames;
}

}  // namespace vidfield
