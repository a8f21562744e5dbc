// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "core/tensor.hpp"

namespace vidfield {

// T x H x W x 3 frames with values in [0, 1].
struct Video {
  Tensor frames;
  double fps = 30.0;  // informational

  std::size_t count() const { return frames.dim(0); }
  std::size_t height() const { return frames.dim(1); }
  std::size_t width() const { return frames.dim(2); }
  Tensor frame(std::size_t k) const;
  void set_frame(std::size_t k, const Tensor& f);

  // Throws invalid_argument unless T >= 2 and the layout is T x H x W x 3.
  void validate() const;
};

namespace io {

// `path` is either a directory of numbered PNG frames (8-bit RGB; the last
// run of digits in each file name is the frame index) or a single .vtf file.
Video load_video(const std::filesystem::path& path);

// A path ending in .vtf writes one tensor file; anything else is treated as a
// directory and receives frame_00000.png, frame_00001.png, ...
void save_video(const Video& video, const std::filesystem::path& path);

// Single-frame PNG helpers (H x W x 3 in [0, 1], quantized to 8 bits).
Tensor read_png(const std::filesystem::path& path);
void write_png(const Tensor& frame, const std::filesystem::path& path);

std::string frame_file_name(std::size_t index);

}  // namespace io
}  // namespace vidfield
