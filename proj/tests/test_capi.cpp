// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
// Exercises the shared library through its C header only, plus the CLI.
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "vidfield/vidfield.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  vf_string_free(s);
  return out;
}

struct VideoDeleter {
  void operator()(vf_video* v) const { vf_video_free(v); }
};
struct ModelDeleter {
  void operator()(vf_model* m) const { vf_model_free(m); }
};
using VideoPtr = std::unique_ptr<vf_video, VideoDeleter>;
using ModelPtr = std::unique_ptr<vf_model, ModelDeleter>;

VideoPtr synth(const json& params) {
  vf_video* v = nullptr;
  REQUIRE(vf_video_synth(params.dump().c_str(), &v) == VF_OK);
  return VideoPtr(v);
}

json small_rep() {
  return {{"family", "triplane"}, {"frames", 4},           {"height", 8},
          {"width", 8},           {"plane_resolution", 4}, {"plane_channels", 2},
          {"decoder_hidden", 4}};
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("vidfield_capi_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(VIDFIELD_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("library identity") {
  CHECK(std::string(vf_version()) == "0.1.0");
  const std::string p = vf_precision();
  CHECK((p == "f32" || p == "f64"));
  char* kinds = nullptr;
  REQUIRE(vf_synth_kinds(&kinds) == VF_OK);
  CHECK(json::parse(take(kinds)).size() == 5);
}

TEST_CASE("video round trip through the C API") {
  std::vector<double> data(2 * 3 * 4 * 3);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = static_cast<double>(i % 7) / 8.0;
  vf_video* raw = nullptr;
  REQUIRE(vf_video_create(2, 3, 4, data.data(), &raw) == VF_OK);
  VideoPtr v(raw);
  size_t t = 0, h = 0, w = 0;
  REQUIRE(vf_video_shape(v.get(), &t, &h, &w) == VF_OK);
  CHECK((t == 2 && h == 3 && w == 4));

  const auto dir = scratch("video");
  const std::string path = (dir / "v.vtf").string();
  REQUIRE(vf_video_save(v.get(), path.c_str()) == VF_OK);
  vf_video* back = nullptr;
  REQUIRE(vf_video_load(path.c_str(), &back) == VF_OK);
  VideoPtr b(back);
  std::vector<double> out(data.size());
  REQUIRE(vf_video_data(b.get(), out.data(), out.size()) == VF_OK);
  CHECK(out == data);
  CHECK(vf_video_data(b.get(), out.data(), 3) == VF_ERR_INVALID_ARGUMENT);

  std::vector<double> bad = data;
  bad[0] = 2.0;
  bad[1] = -1.0;
  vf_video* clamped = nullptr;
  REQUIRE(vf_video_create(2, 3, 4, bad.data(), &clamped) == VF_OK);
  REQUIRE(vf_video_data(clamped, out.data(), out.size()) == VF_OK);
  CHECK(out[0] == 1.0);
  CHECK(out[1] == 0.0);
  vf_video_free(clamped);
  bad[2] = std::nan("");
  vf_video* rejected = nullptr;
  CHECK(vf_video_create(2, 3, 4, bad.data(), &rejected) == VF_ERR_INVALID_ARGUMENT);
  CHECK(rejected == nullptr);
  CHECK(std::string(vf_last_error()).find("non-finite") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("error codes and messages") {
  vf_video* v = nullptr;
  CHECK(vf_video_synth(R"({"kind": "spiral"})", &v) == VF_ERR_INVALID_ARGUMENT);
  CHECK(std::string(vf_last_error()).find("translating_square") != std::string::npos);
  CHECK(vf_video_synth("{not json", &v) == VF_ERR_INVALID_ARGUMENT);
  CHECK(vf_video_load("/nonexistent/vidfield/video.vtf", &v) == VF_ERR_IO);
  vf_model* m = nullptr;
  CHECK(vf_model_create(R"({"family": "octree"})", &m) == VF_ERR_INVALID_ARGUMENT);
  CHECK(vf_model_load("/nonexistent/model.vfck", &m) == VF_ERR_IO);
  CHECK(vf_model_param_count(nullptr, nullptr) == VF_ERR_INVALID_ARGUMENT);
}

TEST_CASE("model fit, save, load and render") {
  VideoPtr video = synth({{"kind", "translating_square"}, {"frames", 4}, {"height", 8}, {"width", 8}});
  vf_model* raw = nullptr;
  REQUIRE(vf_model_create(small_rep().dump().c_str(), &raw) == VF_OK);
  ModelPtr model(raw);
  size_t params = 0;
  REQUIRE(vf_model_param_count(model.get(), &params) == VF_OK);
  CHECK(params > 0);
  CHECK(take([&] {
          char* s = nullptr;
          vf_model_fit_echo(model.get(), &s);
          return s;
        }()) == "null");

  char* report = nullptr;
  char* csv = nullptr;
  REQUIRE(vf_model_fit(model.get(), video.get(), R"({"mode": "interpolation", "window": 1})", R"({"steps": 5})",
                       &report, &csv) == VF_OK);
  const json r = json::parse(take(report));
  CHECK(r["steps_run"] == 5);
  CHECK(r["params"] == params);
  CHECK(take(csv).rfind("step,loss\n", 0) == 0);

  const auto dir = scratch("model");
  const std::string ckpt = (dir / "m.vfck").string();
  REQUIRE(vf_model_save(model.get(), ckpt.c_str()) == VF_OK);
  vf_model* loaded_raw = nullptr;
  REQUIRE(vf_model_load(ckpt.c_str(), &loaded_raw) == VF_OK);
  ModelPtr loaded(loaded_raw);

  const double times[3] = {0, 0.5, 1};
  std::vector<double> a(3 * 8 * 8 * 3), b(a.size());
  REQUIRE(vf_model_render(model.get(), times, 3, a.data(), a.size()) == VF_OK);
  REQUIRE(vf_model_render(loaded.get(), times, 3, b.data(), b.size()) == VF_OK);
  CHECK(a == b);
  const double bad_time = 1.5;
  CHECK(vf_model_render(model.get(), &bad_time, 1, a.data(), a.size()) == VF_ERR_INVALID_ARGUMENT);

  char* echo = nullptr;
  REQUIRE(vf_model_fit_echo(loaded.get(), &echo) == VF_OK);
  CHECK(json::parse(take(echo))["fit"]["steps"] == 5);

  REQUIRE(vf_model_render_png(loaded.get(), times, 3, (dir / "frames").string().c_str()) == VF_OK);
  CHECK(fs::exists(dir / "frames" / "frame_00002.png"));

  char* metrics = nullptr;
  REQUIRE(vf_model_eval(loaded.get(), video.get(), R"({"mode": "extrapolation", "window": 1})", &metrics) == VF_OK);
  const json m = json::parse(take(metrics));
  CHECK(m["eval_metrics"].size() == 1);
  CHECK(m["train_metrics"].size() == 3);

  VideoPtr other = synth({{"kind", "constant"}, {"frames", 5}, {"height", 8}, {"width", 8}});
  CHECK(vf_model_eval(loaded.get(), other.get(), nullptr, &metrics) == VF_ERR_INVALID_ARGUMENT);

  std::string bytes = slurp(ckpt);
  bytes[bytes.size() - 9] ^= 0x10;
  std::ofstream(ckpt, std::ios::binary) << bytes;
  vf_model* corrupt = nullptr;
  CHECK(vf_model_load(ckpt.c_str(), &corrupt) == VF_ERR_CHECKSUM);
  fs::remove_all(dir);
}

TEST_CASE("frame metrics and budget matching") {
  VideoPtr a = synth({{"kind", "translating_texture"}, {"frames", 3}, {"height", 16}, {"width", 16}});
  char* s = nullptr;
  REQUIRE(vf_frame_metrics(a.get(), 1, a.get(), 1, &s) == VF_OK);
  const json m = json::parse(take(s));
  CHECK(m["psnr"] == 99.0);
  CHECK(m["ssim"] == doctest::Approx(1.0));

  json ref = {{"family", "triplane"}, {"frames", 32}, {"height", 64}, {"width", 64}};
  REQUIRE(vf_match_budget(ref.dump().c_str(), "voxel", &s) == VF_OK);
  const json match = json::parse(take(s));
  CHECK(match["within_tolerance"] == true);
  CHECK(std::abs(match["relative_error"].get<double>()) <= 0.05);
  CHECK(vf_match_budget(ref.dump().c_str(), "mesh", &s) == VF_ERR_INVALID_ARGUMENT);
}

TEST_CASE("gradcheck through the C API") {
  char* report = nullptr;
  REQUIRE(vf_gradcheck("warp", 2, 3, &report) == VF_OK);
  const json r = json::parse(take(report));
  CHECK(r["passed"] == true);
  CHECK(r["ops"].size() >= 3);

  REQUIRE(vf_set_gradient_fault("forward_warp", 1.5) == VF_OK);
  CHECK(vf_gradcheck("warp", 2, 3, &report) == VF_ERR_GRADCHECK);
  const json f = json::parse(take(report));
  CHECK(f["passed"] == false);
  REQUIRE(vf_set_gradient_fault(nullptr, 1) == VF_OK);
  CHECK(vf_gradcheck("sideways", 1, 1, &report) == VF_ERR_INVALID_ARGUMENT);
}

TEST_CASE("cli end to end") {
  const auto dir = scratch("cli");
  const std::string d = dir.string();

  REQUIRE(run_cli("synth --kind translating_square --frames 4 --size 8 --out " + d + "/a.vtf") == 0);
  REQUIRE(run_cli("synth --kind translating_square --frames 4 --size 8 --out " + d + "/b.vtf") == 0);
  CHECK(slurp(dir / "a.vtf") == slurp(dir / "b.vtf"));
  CHECK(run_cli("synth --kind spiral --out " + d + "/c.vtf") == 2);
  CHECK(run_cli("synth --frames nope --out " + d + "/c.vtf") == 2);
  CHECK(run_cli("fit --video " + d + "/missing.vtf --out " + d + "/f") == 1);

  REQUIRE(run_cli("fit --video " + d + "/a.vtf --out " + d + "/fit --steps 3 --window 1 --family triplane") == 0);
  for (const char* f : {"report.json", "loss.csv", "model.vfck", "resolved_config.json"})
    CHECK(fs::exists(dir / "fit" / f));
  const json resolved = json::parse(slurp(dir / "fit" / "resolved_config.json"));
  CHECK(resolved["fit"]["steps"] == 3);
  CHECK(resolved["representation"]["frames"] == 4);

  REQUIRE(run_cli("render --checkpoint " + d + "/fit/model.vfck --times 0,0.5,1 --out " + d + "/render") == 0);
  CHECK(fs::exists(dir / "render" / "frame_00002.png"));
  CHECK_FALSE(fs::exists(dir / "render" / "frame_00003.png"));

  REQUIRE(run_cli("eval --checkpoint " + d + "/fit/model.vfck --video " + d + "/a.vtf --out " + d + "/eval.json") == 0);
  CHECK(json::parse(slurp(dir / "eval.json")).contains("mean_eval"));
  REQUIRE(run_cli("synth --kind constant --frames 5 --size 8 --out " + d + "/five.vtf") == 0);
  CHECK(run_cli("eval --checkpoint " + d + "/fit/model.vfck --video " + d + "/five.vtf") == 2);

  CHECK(run_cli("gradcheck --scope warp --trials 2 --out " + d + "/gc.json") == 0);
  const json gc = json::parse(slurp(dir / "gc.json"));
  std::vector<std::string> ops;
  for (const auto& op : gc["suites"][0]["ops"]) ops.push_back(op["op"]);
  std::sort(ops.begin(), ops.end());
  CHECK(std::adjacent_find(ops.begin(), ops.end()) == ops.end());
  CHECK(run_cli("gradcheck --scope warp --trials 2 --inject-fault forward_warp") == 4);
  fs::remove_all(dir);
}
