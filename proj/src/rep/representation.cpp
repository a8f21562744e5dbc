// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#include "rep/representation.hpp"

#include "motion/flow_triplane.hpp"
#include "rep/posenc.hpp"
#include "rep/triplane.hpp"
#include "rep/voxel.hpp"

namespace vidfield {

Var Representation::render(Tape& tape, real t) const {
  return render(tape, std::span<const real>(&t, 1)).front();
}

Tensor Representation::render_frame(real t) const {
  Tape tape;
  return render(tape, t).value();
}

std::unique_ptr<Representation> make_representation(const RepConfig& config) {
  config.validate();
  switch (config.family) {
    case Family::triplane: return std::make_unique<TriPlaneRep>(config);
    case Family::voxel: return std::make_unique<VoxelRep>(config);
    case Family::posenc: return std::make_unique<PosEncMlpRep>(config);
    case Family::triplane_flow: return std::make_unique<FlowTriPlaneRep>(config);
  }
  fail(ErrorCode::internal, "unhandled representation family");
}

Tensor pixel_grid_coords(std::size_t height, std::size_t width, std::size_t rows, std::size_t cols) {
  Tensor out({height * width, 2});
  // Integer products first so the last pixel lands exactly on the last cell.
  auto map = [](std::size_t k, std::size_t frame, std::size_t cells) {
    return static_cast<real>(k * (cells - 1)) / static_cast<real>(frame - 1);
  };
  for (std::size_t i = 0; i < height; ++i)
    for (std::size_t j = 0; j < width; ++j) {
      out[2 * (i * width + j)] = map(j, width, cols);
      out[2 * (i * width + j) + 1] = map(i, height, rows);
    }
  return out;
}

}  // namespace vidfield
