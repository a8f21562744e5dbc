// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#include "io/video.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <regex>

#include "io/vtf.hpp"

namespace vidfield {

Tensor Video::frame(std::size_t k) const {
  const std::size_t n = height() * width() * 3;
  require(k < count(), "frame index out of range");
  std::vector<real> data(frames.ptr() + k * n, frames.ptr() + (k + 1) * n);
  return Tensor({height(), width(), 3}, std::move(data));
}

void Video::set_frame(std::size_t k, const Tensor& f) {
  require(k < count() && f.shape() == Shape({height(), width(), 3}), "set_frame: bad index or geometry");
  std::copy(f.ptr(), f.ptr() + f.size(), frames.ptr() + k * f.size());
}

void Video::validate() const {
  require(frames.rank() == 4 && frames.dim(3) == 3,
          "video must be T x H x W x 3, got " + shape_string(frames.shape()));
  require(frames.dim(0) >= 2, "video needs at least 2 frames");
}

namespace io {

std::string frame_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%05zu.png", index);
  return buf;
}

Tensor read_png(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str()))
    fail(ErrorCode::io, "cannot read PNG " + path.string() + ": " + image.message);
  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&image);
    fail(ErrorCode::format, "unsupported bit depth in " + path.string() + " (expected 8-bit)");
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<png_byte> buf(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr))
    fail(ErrorCode::io, "cannot decode PNG " + path.string() + ": " + image.message);
  Tensor out({image.height, image.width, 3});
  for (std::size_t i = 0; i < buf.size(); ++i) out[i] = static_cast<real>(buf[i]) / real(255);
  return out;
}

void write_png(const Tensor& frame, const std::filesystem::path& path) {
  require(frame.rank() == 3 && frame.dim(2) == 3, "write_png: frame must be H x W x 3");
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(frame.dim(1));
  image.height = static_cast<png_uint_32>(frame.dim(0));
  image.format = PNG_FORMAT_RGB;
  std::vector<png_byte> buf(frame.size());
  for (std::size_t i = 0; i < buf.size(); ++i) {
    const double v = std::clamp(static_cast<double>(frame[i]), 0.0, 1.0);
    buf[i] = static_cast<png_byte>(std::lround(v * 255.0));
  }
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, buf.data(), 0, nullptr))
    fail(ErrorCode::io, "cannot write PNG " + path.string() + ": " + image.message);
}

namespace {

bool is_vtf(const std::filesystem::path& p) { return p.extension() == ".vtf"; }

Video load_frame_directory(const std::filesystem::path& dir) {
  static const std::regex pattern(R"(^(.*?)(\d+)\.png$)", std::regex::icase);
  std::map<std::size_t, std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    std::smatch m;
    if (!std::regex_match(name, m, pattern)) continue;
    const std::size_t index = std::stoul(m[2].str());
    require(files.emplace(index, entry.path()).second, "duplicate frame index " + std::to_string(index) + " in " +
                                                           dir.string());
  }
  require(files.size() >= 2, "frame directory " + dir.string() + " holds fewer than 2 numbered PNG frames");
  std::size_t expected = 0;
  for (const auto& [index, _] : files) {
    require(index == expected, "frame directory " + dir.string() + " is missing frame index " +
                                   std::to_string(expected));
    ++expected;
  }
  Tensor first = read_png(files.begin()->second);
  const std::size_t h = first.dim(0), w = first.dim(1);
  Video v{Tensor({files.size(), h, w, 3})};
  for (const auto& [index, path] : files) {
    Tensor f = index == 0 ? first : read_png(path);
    require(f.shape() == first.shape(), "frame " + std::to_string(index) + " has geometry " +
                                            shape_string(f.shape()) + ", expected " + shape_string(first.shape()));
    v.set_frame(index, f);
  }
  return v;
}

}  // namespace

Video load_video(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) fail(ErrorCode::io, "no such video: " + path.string());
  Video v;
  if (std::filesystem::is_directory(path)) {
    v = load_frame_directory(path);
  } else if (is_vtf(path)) {
    v.frames = load_vtf(path);
    v.validate();
    for (auto& x : v.frames.data()) x = std::clamp(x, real(0), real(1));
  } else {
    fail(ErrorCode::invalid_argument, "unsupported video path " + path.string() +
                                          " (expected a frame directory or a .vtf file)");
  }
  v.validate();
  return v;
}

void save_video(const Video& video, const std::filesystem::path& path) {
  video.validate();
  if (is_vtf(path)) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    save_vtf(video.frames, path);
    return;
  }
  std::filesystem::create_directories(path);
  for (std::size_t k = 0; k < video.count(); ++k) write_png(video.frame(k), path / frame_file_name(k));
}

}  // namespace io
}  // namespace vidfield
