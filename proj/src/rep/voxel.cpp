// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#include "rep/voxel.hpp"

#include <algorithm>

namespace vidfield {

VoxelRep::VoxelRep(RepConfig config) : Representation(std::move(config)) {
  const std::size_t d = config_.voxel_resolution, c = config_.voxel_channels;
  decoder_ = FrameDecoder("decoder", c, config_.decoder_hidden);
  Pcg32 rng(config_.seed);
  params_.add("volume", normal_tensor({d, d, d, c}, 0.1, rng));
  decoder_.init(params_, rng);
}

Var VoxelRep::feature_frame(Tape& tape, real t, std::size_t hf, std::size_t wf) const {
  require(hf >= 2 && wf >= 2, "feature_frame: frame extent must be >= 2");
  const std::size_t d = config_.voxel_resolution;
  const real pt = std::clamp(t, real(0), real(1)) * static_cast<real>(d - 1);
  Tensor xy = pixel_grid_coords(hf, wf, d, d);
  Tensor xyt({hf * wf, 3});
  for (std::size_t p = 0; p < hf * wf; ++p) {
    xyt[3 * p] = xy[2 * p];
    xyt[3 * p + 1] = xy[2 * p + 1];
    xyt[3 * p + 2] = pt;
  }
  Var feat = ops::trilinear_sample3d(tape.param(params_.get("volume")), tape.constant(std::move(xyt)));
  return ops::reshape(feat, {hf, wf, config_.voxel_channels});
}

std::vector<Var> VoxelRep::render(Tape& tape, std::span<const real> times) const {
  std::vector<Var> frames;
  frames.reserve(times.size());
  for (real t : times)
    frames.push_back(decoder_.decode(tape, params_, feature_frame(tape, t, config_.height, config_.width)));
  return frames;
}

}  // namespace vidfield
