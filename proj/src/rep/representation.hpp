// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <span>
#include <vector>

#include "core/tape.hpp"
#include "rep/config.hpp"

namespace vidfield {

// Common contract of every video representation: render an H x W x 3 frame
// at a normalized time t in [0, 1] (frame k of T sits at t = k / (T - 1)).
class Representation {
 public:
  explicit Representation(RepConfig config) : config_(std::move(config)) {}
  virtual ~Representation() = default;
  Representation(const Representation&) = delete;
  Representation& operator=(const Representation&) = delete;

  const RepConfig& config() const { return config_; }
  Family family() const { return config_.family; }
  ParameterSet& parameters() { return params_; }
  const ParameterSet& parameters() const { return params_; }
  std::size_t param_count() const { return params_.total_size(); }

  // Records the frames for `times` on `tape`. Families that share work across
  // frames (the flow recurrence) do it once per call.
  virtual std::vector<Var> render(Tape& tape, std::span<const real> times) const = 0;

  Var render(Tape& tape, real t) const;
  Tensor render_frame(real t) const;

 protected:
  RepConfig config_;
  ParameterSet params_;
};

// Builds and initializes the family named in `config` (validated first).
std::unique_ptr<Representation> make_representation(const RepConfig& config);

// Normalized time of frame k in a T-frame video.
inline real frame_time(std::size_t k, std::size_t frames) {
  return static_cast<real>(k) / static_cast<real>(frames - 1);
}

// H*W x 2 grid coordinates (px, py) of the pixel centers of an H x W frame
// mapped onto a plane with `cols` x `rows` cells (align-corners).
Tensor pixel_grid_coords(std::size_t height, std::size_t width, std::size_t rows, std::size_t cols);

}  // namespace vidfield
