// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstring>
#include <filesystem>

#include <png.h>

#include "io/checkpoint.hpp"
#include "io/synth.hpp"
#include "io/video.hpp"
#include "io/vtf.hpp"
#include "test_util.hpp"

using namespace vidfield;
using vidfield::testing::error_code_of;
using vidfield::testing::random_tensor;
using vidfield::testing::temp_dir;
namespace fs = std::filesystem;

namespace {

Video random_video(std::size_t t, std::size_t h, std::size_t w, std::uint64_t seed) {
  Pcg32 rng(seed);
  return Video{random_tensor({t, h, w, 3}, rng, 0, 1)};
}

io::SynthParams synth(const std::string& kind, std::uint64_t seed = 0) {
  io::SynthParams p;
  p.kind = kind;
  p.frames = 6;
  p.height = 24;
  p.width = 28;
  p.seed = seed;
  return p;
}

}  // namespace

TEST_CASE("vtf layout and lossless round trip") {
  Pcg32 rng(1);
  Tensor t = random_tensor({3, 2, 5}, rng);
  const std::string bytes = io::encode_vtf(t);
  CHECK(bytes.substr(0, 4) == "VTF1");
  CHECK(static_cast<unsigned char>(bytes[4]) == (kSinglePrecision ? 1 : 2));
  CHECK(static_cast<unsigned char>(bytes[5]) == 3);
  CHECK(io::get_u64le(bytes, 6) == 3);
  CHECK(io::get_u64le(bytes, 14) == 2);
  CHECK(io::get_u64le(bytes, 22) == 5);
  CHECK(bytes.size() == 6 + 3 * 8 + t.size() * sizeof(real));
  // Little-endian payload: the first value's bytes follow the header.
  real first;
  std::memcpy(&first, bytes.data() + 30, sizeof(real));
  CHECK(first == t[0]);

  CHECK(io::decode_vtf(bytes) == t);
  auto dir = temp_dir("vtf");
  io::save_vtf(t, dir / "t.vtf");
  CHECK(io::load_vtf(dir / "t.vtf") == t);

  CHECK(error_code_of([&] { io::decode_vtf("VTF2" + bytes.substr(4)); }) == ErrorCode::format);
  CHECK(error_code_of([&] { io::decode_vtf(bytes.substr(0, bytes.size() - 1)); }) == ErrorCode::format);
  std::string bad_dtype = bytes;
  bad_dtype[4] = 9;
  CHECK(error_code_of([&] { io::decode_vtf(bad_dtype); }) == ErrorCode::format);
}

TEST_CASE("vtf reads a hand-built f32 tensor") {
  std::string bytes = "VTF1";
  bytes.push_back(1);
  bytes.push_back(1);
  io::put_u64le(bytes, 2);
  const float vals[2] = {0.25f, -3.5f};
  for (float v : vals) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
  }
  CHECK(io::decode_vtf(bytes) == Tensor::from({0.25, -3.5}));
}

TEST_CASE("video round trips") {
  auto dir = temp_dir("video");
  Video v = random_video(3, 5, 7, 2);
  io::save_video(v, dir / "v.vtf");
  CHECK(io::load_video(dir / "v.vtf").frames == v.frames);

  io::save_video(v, dir / "png");
  CHECK(fs::exists(dir / "png" / "frame_00000.png"));
  Video back = io::load_video(dir / "png");
  CHECK(back.frames.shape() == v.frames.shape());
  CHECK(max_abs_diff(back.frames, v.frames) <= real(1.0 / 255 / 2 + 1e-6));
  // 8-bit values map to v / 255.
  for (std::size_t i = 0; i < back.frames.size(); ++i) {
    const double scaled = back.frames[i] * 255.0;
    CHECK(std::abs(scaled - std::round(scaled)) < 1e-4);
  }
}

TEST_CASE("frame directories are validated") {
  auto dir = temp_dir("frames");
  Video v = random_video(4, 4, 4, 3);
  io::save_video(v, dir);
  fs::remove(dir / "frame_00002.png");
  try {
    io::load_video(dir);
    FAIL("missing frame not detected");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_argument);
    CHECK(std::string(e.what()).find('2') != std::string::npos);
  }

  auto geo = temp_dir("geometry");
  io::write_png(Tensor({4, 4, 3}), geo / "a_0.png");
  io::write_png(Tensor({4, 5, 3}), geo / "a_1.png");
  CHECK(error_code_of([&] { io::load_video(geo); }) == ErrorCode::invalid_argument);

  CHECK(error_code_of([&] { io::load_video(dir / "missing_dir"); }) == ErrorCode::io);
}

TEST_CASE("16-bit PNG input is rejected") {
  auto dir = temp_dir("png16");
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = 2;
  image.height = 2;
  image.format = PNG_FORMAT_LINEAR_RGB;
  std::vector<png_uint_16> pixels(12, 30000);
  const std::string path = (dir / "frame_0.png").string();
  REQUIRE(png_image_write_to_file(&image, path.c_str(), 0, pixels.data(), 0, nullptr));
  CHECK(error_code_of([&] { io::read_png(path); }) == ErrorCode::format);
}

TEST_CASE("synthetic videos") {
  Video c = io::synth_video(synth("constant"));
  for (std::size_t k = 1; k < c.count(); ++k) CHECK(c.frame(k) == c.frame(0));

  // translating_square at (1, 0) px/frame: frame k is frame 0 shifted by k.
  io::SynthParams sq = synth("translating_square");
  sq.velocity_x = 1;
  sq.velocity_y = 0;
  Video s = io::synth_video(sq);
  for (std::size_t k = 1; k < s.count(); ++k)
    for (std::size_t i = 0; i < s.height(); ++i)
      for (std::size_t j = k; j < s.width(); ++j)
        for (std::size_t ch = 0; ch < 3; ++ch)
          REQUIRE(s.frames.at(k, i, j, ch) == s.frames.at(0, i, j - k, ch));

  for (const auto& kind : io::synth_kinds()) {
    Video a = io::synth_video(synth(kind, 4));
    Video b = io::synth_video(synth(kind, 4));
    CHECK(a.frames == b.frames);
    CHECK(a.frames.shape() == Shape{6, 24, 28, 3});
    for (real v : a.frames.data()) {
      REQUIRE(v >= 0);
      REQUIRE(v <= 1);
    }
  }

  Video t1 = io::synth_video(synth("translating_texture", 1));
  Video t2 = io::synth_video(synth("translating_texture", 2));
  CHECK(t1.frames != t2.frames);
  double m1 = 0, m2 = 0;
  for (std::size_t i = 0; i < t1.frames.size(); ++i) {
    m1 += t1.frames[i];
    m2 += t2.frames[i];
  }
  CHECK(std::abs(m1 - m2) / static_cast<double>(t1.frames.size()) < 0.1);

  try {
    io::synth_video(synth("spiral"));
    FAIL("bad kind accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_argument);
    CHECK(std::string(e.what()).find("two_objects_crossing") != std::string::npos);
  }
  io::SynthParams tiny = synth("constant");
  tiny.frames = 1;
  CHECK(error_code_of([&] { io::synth_video(tiny); }) == ErrorCode::invalid_argument);
}

TEST_CASE("checkpoint round trip and corruption") {
  RepConfig c;
  c.frames = 4;
  c.height = 6;
  c.width = 6;
  c.plane_resolution = 4;
  c.plane_channels = 2;
  c.voxel_resolution = 3;
  c.mlp_hidden = 6;
  c.mlp_depth = 2;
  c.decoder_hidden = 3;
  auto dir = temp_dir("checkpoint");
  for (Family f : {Family::triplane, Family::voxel, Family::posenc, Family::triplane_flow}) {
    c.family = f;
    c.seed = 7;
    auto rep = make_representation(c);
    const nlohmann::json echo = {{"steps", 3}};
    const fs::path path = dir / (to_string(f) + ".vfck");
    io::save_checkpoint(*rep, path, echo);
    io::Checkpoint back = io::load_checkpoint(path);
    CHECK(back.representation->config() == rep->config());
    CHECK(back.fit == echo);
    for (std::size_t i = 0; i < rep->parameters().all().size(); ++i)
      CHECK(back.representation->parameters().all()[i].value == rep->parameters().all()[i].value);
    CHECK(back.representation->render_frame(0.3) == rep->render_frame(0.3));
  }

  auto rep = make_representation(c);
  std::string bytes = io::encode_checkpoint(*rep);
  const std::uint64_t header_len = io::get_u64le(bytes, 0);
  auto header = nlohmann::json::parse(bytes.substr(8, header_len));
  CHECK(header["format_version"] == io::kCheckpointVersion);
  CHECK(header["tensors"].size() == rep->parameters().all().size());

  std::string corrupt = bytes;
  corrupt[corrupt.size() - 3] ^= 0x40;
  CHECK(error_code_of([&] { io::decode_checkpoint(corrupt); }) == ErrorCode::checksum);

  CHECK(error_code_of([&] { io::decode_checkpoint(bytes.substr(0, bytes.size() - 10)); }) == ErrorCode::format);

  header["format_version"] = 99;
  const std::string new_header = header.dump();
  std::string versioned;
  io::put_u64le(versioned, new_header.size());
  versioned += new_header + bytes.substr(8 + header_len);
  CHECK(error_code_of([&] { io::decode_checkpoint(versioned); }) == ErrorCode::version);

  CHECK(error_code_of([&] { io::load_checkpoint(dir / "nope.vfck"); }) == ErrorCode::io);
}
