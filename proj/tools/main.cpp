// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
//
// vidfield command-line front end. Talks to the library only through the C
// interface in vidfield/vidfield.h.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "vidfield/vidfield.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kIo = 1, kUsage = 2, kDivergence = 3, kGradcheck = 4 };

struct Failure {
  int exit_code;
  std::string message;
};

int exit_code_of(vf_status s) {
  switch (s) {
    case VF_OK: return kOk;
    case VF_ERR_INVALID_ARGUMENT: return kUsage;
    case VF_ERR_DIVERGENCE:
    case VF_ERR_NUMERIC: return kDivergence;
    case VF_ERR_GRADCHECK: return kGradcheck;
    default: return kIo;
  }
}

void check(vf_status s) {
  if (s != VF_OK) throw Failure{exit_code_of(s), vf_last_error()};
}

[[noreturn]] void usage(const std::string& message) { throw Failure{kUsage, message}; }

// Owning wrappers for the C handles and strings.
struct VideoDeleter {
  void operator()(vf_video* v) const { vf_video_free(v); }
};
struct ModelDeleter {
  void operator()(vf_model* m) const { vf_model_free(m); }
};
using VideoPtr = std::unique_ptr<vf_video, VideoDeleter>;
using ModelPtr = std::unique_ptr<vf_model, ModelDeleter>;

std::string take(char* s) {
  std::string out = s ? s : "";
  vf_string_free(s);
  return out;
}

VideoPtr load_video(const std::string& path) {
  vf_video* v = nullptr;
  check(vf_video_load(path.c_str(), &v));
  return VideoPtr(v);
}

ModelPtr load_model(const std::string& path) {
  vf_model* m = nullptr;
  check(vf_model_load(path.c_str(), &m));
  return ModelPtr(m);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Failure{kIo, "cannot write " + path.string()};
  out << text;
  if (!out) throw Failure{kIo, "cannot write " + path.string()};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Failure{kIo, "cannot open config " + path};
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    usage("config " + path + ": " + e.what());
  }
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Failure{kIo, "cannot create " + dir.string() + ": " + ec.message()};
}

// Writes the fully resolved run description next to a command's outputs.
void echo_config(const fs::path& dir, const std::string& command, json resolved) {
  resolved["schema_version"] = 1;
  resolved["command"] = command;
  resolved["precision"] = vf_precision();
  write_text(dir / "resolved_config.json", resolved.dump(2) + "\n");
}

// Config file sections with command-line overrides applied (flags win).
struct RunConfig {
  json representation = json::object();
  json fit = json::object();
  json holdout = json::object();
};

struct Overrides {
  std::string config_path;
  std::optional<std::string> family;
  std::optional<std::size_t> steps, batch, patience, window;
  std::optional<double> lr;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<bool> deterministic;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON run config with representation/fit/holdout sections")
        ->check(CLI::ExistingFile);
    cmd->add_option("--family", family, "triplane, voxel, posenc or triplane_flow");
    cmd->add_option("--steps", steps, "Adam steps");
    cmd->add_option("--batch", batch, "frames per step");
    cmd->add_option("--lr", lr, "learning rate");
    cmd->add_option("--seed", seed, "seed for initialization and batch sampling");
    cmd->add_option("--patience", patience, "early-stop patience in steps (0 = off)");
    cmd->add_option("--mode", mode, "holdout mode: interpolation or extrapolation");
    cmd->add_option("--window", window, "holdout window K");
    cmd->add_flag("--deterministic,!--parallel", deterministic, "serialize all work (default on)");
  }

  RunConfig resolve(std::size_t frames, std::size_t height, std::size_t width) const {
    RunConfig rc;
    if (!config_path.empty()) {
      json file = read_json_file(config_path);
      if (!file.is_object()) usage("config must be a JSON object");
      for (const auto& [key, _] : file.items())
        if (key != "representation" && key != "fit" && key != "holdout" && key != "schema_version")
          usage("unknown config section '" + key + "'");
      if (file.contains("representation")) rc.representation = file["representation"];
      if (file.contains("fit")) rc.fit = file["fit"];
      if (file.contains("holdout")) rc.holdout = file["holdout"];
    }
    json& r = rc.representation;
    if (family) r["family"] = *family;
    if (seed) {
      r["seed"] = *seed;
      rc.fit["seed"] = *seed;
    }
    // Geometry comes from the video unless the config pins it (a mismatch is
    // then reported by the library).
    if (!r.contains("frames")) r["frames"] = frames;
    if (!r.contains("height")) r["height"] = height;
    if (!r.contains("width")) r["width"] = width;
    if (steps) rc.fit["steps"] = *steps;
    if (batch) rc.fit["batch"] = *batch;
    if (lr) rc.fit["lr"] = *lr;
    if (patience) rc.fit["patience"] = *patience;
    if (deterministic) rc.fit["deterministic"] = *deterministic;
    if (mode) rc.holdout["mode"] = *mode;
    if (window) rc.holdout["window"] = *window;
    if (!rc.holdout.contains("mode")) rc.holdout["mode"] = "interpolation";
    if (!rc.holdout.contains("window")) rc.holdout["window"] = 3;
    return rc;
  }
};

void video_shape(const vf_video* v, std::size_t& t, std::size_t& h, std::size_t& w) {
  check(vf_video_shape(v, &t, &h, &w));
}

std::vector<double> parse_times(const std::string& text) {
  std::vector<double> times;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      times.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      usage("invalid time '" + item + "'");
    }
  }
  if (times.empty()) usage("--times needs at least one value");
  return times;
}

int cmd_synth(const std::string& kind, std::size_t frames, std::size_t size, std::optional<std::size_t> height,
              std::optional<std::size_t> width, std::uint64_t seed, std::optional<double> vx,
              std::optional<double> vy, const std::string& out) {
  json params = {{"kind", kind},
                 {"frames", frames},
                 {"height", height.value_or(size)},
                 {"width", width.value_or(size)},
                 {"seed", seed}};
  if (vx) params["velocity_x"] = *vx;
  if (vy) params["velocity_y"] = *vy;
  vf_video* raw = nullptr;
  check(vf_video_synth(params.dump().c_str(), &raw));
  VideoPtr video(raw);
  check(vf_video_save(video.get(), out.c_str()));
  const fs::path p(out);
  const fs::path echo_dir = p.extension() == ".vtf" ? (p.has_parent_path() ? p.parent_path() : fs::path(".")) : p;
  echo_config(echo_dir, "synth", {{"synth", params}, {"out", out}});
  std::cout << "wrote " << frames << " frames to " << out << "\n";
  return kOk;
}

int cmd_fit(const Overrides& ov, const std::string& video_path, const std::string& out_dir) {
  VideoPtr video = load_video(video_path);
  std::size_t t, h, w;
  video_shape(video.get(), t, h, w);
  RunConfig rc = ov.resolve(t, h, w);
  ensure_dir(out_dir);
  echo_config(out_dir, "fit",
              {{"video", video_path}, {"representation", rc.representation}, {"fit", rc.fit},
               {"holdout", rc.holdout}});
  vf_model* raw = nullptr;
  check(vf_model_create(rc.representation.dump().c_str(), &raw));
  ModelPtr model(raw);
  char* report = nullptr;
  char* csv = nullptr;
  check(vf_model_fit(model.get(), video.get(), rc.holdout.dump().c_str(), rc.fit.dump().c_str(), &report, &csv));
  const std::string report_text = take(report);
  write_text(fs::path(out_dir) / "report.json", report_text + "\n");
  write_text(fs::path(out_dir) / "loss.csv", take(csv));
  check(vf_model_save(model.get(), (fs::path(out_dir) / "model.vfck").string().c_str()));
  const json r = json::parse(report_text);
  std::printf("steps %zu  final loss %.6g  train PSNR %.3f dB  eval PSNR %.3f dB  eval SSIM %.4f\n",
              r["steps_run"].get<std::size_t>(), r["loss"].empty() ? 0.0 : r["loss"].back().get<double>(),
              r["mean_train_psnr"].get<double>(), r["mean_eval_psnr"].get<double>(),
              r["mean_eval_ssim"].get<double>());
  return kOk;
}

int cmd_render(const std::string& checkpoint, const std::string& times_text, const std::string& out_dir) {
  const std::vector<double> times = parse_times(times_text);
  ModelPtr model = load_model(checkpoint);
  check(vf_model_render_png(model.get(), times.data(), times.size(), out_dir.c_str()));
  echo_config(out_dir, "render", {{"checkpoint", checkpoint}, {"times", times}});
  std::cout << "rendered " << times.size() << " frames to " << out_dir << "\n";
  return kOk;
}

// Without --mode/--window the holdout of the checkpoint's last fit is reused.
int cmd_eval(const std::string& checkpoint, const std::string& video_path, const std::optional<std::string>& mode,
             const std::optional<std::size_t>& window, const std::string& out) {
  ModelPtr model = load_model(checkpoint);
  VideoPtr video = load_video(video_path);
  char* echo_text = nullptr;
  check(vf_model_fit_echo(model.get(), &echo_text));
  const json echo = json::parse(take(echo_text));
  json plan = {{"mode", "interpolation"}, {"window", 3}};
  if (echo.is_object() && echo.contains("holdout")) {
    plan["mode"] = echo["holdout"].value("mode", "interpolation");
    plan["window"] = echo["holdout"].value("window", std::size_t{3});
  }
  if (mode) plan["mode"] = *mode;
  if (window) plan["window"] = *window;
  char* metrics = nullptr;
  check(vf_model_eval(model.get(), video.get(), plan.dump().c_str(), &metrics));
  const std::string text = take(metrics);
  if (out.empty()) {
    std::cout << text << "\n";
  } else {
    write_text(out, text + "\n");
    const fs::path p(out);
    echo_config(p.has_parent_path() ? p.parent_path() : fs::path("."), "eval",
                {{"checkpoint", checkpoint}, {"video", video_path}, {"holdout", plan}});
  }
  return kOk;
}

int cmd_compare(const Overrides& ov, const std::string& video_path, const std::string& out_dir) {
  VideoPtr video = load_video(video_path);
  std::size_t t, h, w;
  video_shape(video.get(), t, h, w);
  RunConfig rc = ov.resolve(t, h, w);
  if (rc.representation.contains("family") && rc.representation["family"] != "triplane")
    usage("compare needs a triplane reference representation");
  ensure_dir(out_dir);
  echo_config(out_dir, "compare",
              {{"video", video_path}, {"reference", rc.representation}, {"fit", rc.fit}, {"holdout", rc.holdout}});
  char* table = nullptr;
  char* csv = nullptr;
  check(vf_compare(video.get(), rc.representation.dump().c_str(), nullptr, rc.holdout.dump().c_str(),
                   rc.fit.dump().c_str(), &table, &csv));
  write_text(fs::path(out_dir) / "comparison.json", take(table) + "\n");
  const std::string csv_text = take(csv);
  write_text(fs::path(out_dir) / "comparison.csv", csv_text);
  std::cout << csv_text;
  return kOk;
}

int cmd_gradcheck(const std::string& scope, std::size_t trials, std::uint64_t seed, const std::string& out,
                  const std::string& fault_op, double fault_factor) {
  std::vector<std::string> scopes;
  if (scope == "all")
    scopes = {"primitives", "warp", "end2end"};
  else
    scopes = {scope};
  if (!fault_op.empty()) check(vf_set_gradient_fault(fault_op.c_str(), fault_factor));
  json all = json::array();
  bool passed = true;
  for (const auto& s : scopes) {
    char* report = nullptr;
    const vf_status st = vf_gradcheck(s.c_str(), trials, seed, &report);
    if (st != VF_OK && st != VF_ERR_GRADCHECK) {
      vf_string_free(report);
      check(st);
    }
    const json r = json::parse(take(report));
    for (const auto& op : r["ops"])
      std::printf("%-10s %-28s worst rel err %.3e  tol %.0e  skipped %zu/%zu  %s\n", s.c_str(),
                  op["op"].get<std::string>().c_str(), op["max_rel_error"].get<double>(),
                  op["tolerance"].get<double>(), op["skipped"].get<std::size_t>(), op["entries"].get<std::size_t>(),
                  op["passed"].get<bool>() ? "ok" : "FAIL");
    passed = passed && st == VF_OK;
    all.push_back(r);
  }
  if (!fault_op.empty()) check(vf_set_gradient_fault(nullptr, 1.0));
  if (!out.empty()) {
    write_text(out, json{{"schema_version", 1}, {"passed", passed}, {"suites", all}}.dump(2) + "\n");
  }
  std::printf("gradcheck %s\n", passed ? "passed" : "FAILED");
  return passed ? kOk : kGradcheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vidfield: neural video representations fitted to a single video"};
  app.require_subcommand(1);
  app.set_version_flag("--version", vf_version());

  int code = kOk;
  // CLI11 reports parse errors through exceptions; map them to exit 2.
  try {
    std::string kind = "translating_texture", out;
    std::size_t frames = 32, size = 64;
    std::optional<std::size_t> height, width;
    std::uint64_t seed = 0;
    std::optional<double> vx, vy;
    auto* synth = app.add_subcommand("synth", "generate a synthetic video");
    synth->add_option("--kind", kind, "constant, translating_square, translating_texture, rotating_bar, "
                                      "two_objects_crossing");
    synth->add_option("--frames", frames, "frame count");
    synth->add_option("--size", size, "frame height and width");
    synth->add_option("--height", height);
    synth->add_option("--width", width);
    synth->add_option("--seed", seed);
    synth->add_option("--velocity-x", vx, "pixels per frame");
    synth->add_option("--velocity-y", vy, "pixels per frame");
    synth->add_option("--out", out, "PNG directory or .vtf file")->required();

    Overrides fit_ov;
    std::string fit_video, fit_out;
    auto* fit = app.add_subcommand("fit", "fit a representation to a video");
    fit->add_option("--video", fit_video, "PNG directory or .vtf file")->required();
    fit->add_option("--out", fit_out, "output directory")->required();
    fit_ov.add_to(fit);

    std::string render_ck, render_times, render_out;
    auto* render = app.add_subcommand("render", "render frames from a checkpoint");
    render->add_option("--checkpoint", render_ck)->required();
    render->add_option("--times", render_times, "comma-separated normalized times in [0, 1]")->required();
    render->add_option("--out", render_out, "output PNG directory")->required();

    std::string eval_ck, eval_video, eval_out;
    std::optional<std::string> eval_mode;
    std::optional<std::size_t> eval_window;
    auto* eval = app.add_subcommand("eval", "PSNR/SSIM of a checkpoint against a video");
    eval->add_option("--checkpoint", eval_ck)->required();
    eval->add_option("--video", eval_video)->required();
    eval->add_option("--mode", eval_mode, "interpolation or extrapolation (default: the checkpoint's fit)");
    eval->add_option("--window", eval_window, "holdout window K (default: the checkpoint's fit)");
    eval->add_option("--out", eval_out, "metrics JSON path (default: stdout)");

    Overrides cmp_ov;
    std::string cmp_video, cmp_out;
    auto* compare = app.add_subcommand("compare", "fit all four families at a matched parameter budget");
    compare->add_option("--video", cmp_video)->required();
    compare->add_option("--out", cmp_out, "output directory")->required();
    cmp_ov.add_to(compare);

    std::string gc_scope = "all", gc_out, fault_op;
    std::size_t gc_trials = 100;
    std::uint64_t gc_seed = 1;
    double fault_factor = 1.5;
    auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient certification");
    gradcheck->add_option("--scope", gc_scope)->check(CLI::IsMember({"primitives", "warp", "end2end", "all"}));
    gradcheck->add_option("--trials", gc_trials, "randomized trials per op");
    gradcheck->add_option("--seed", gc_seed);
    gradcheck->add_option("--out", gc_out, "report JSON path");
    gradcheck->add_option("--inject-fault", fault_op, "scale the gradient of one op (negative control)")
        ->group("");
    gradcheck->add_option("--fault-factor", fault_factor)->group("");

    app.parse(argc, argv);

    if (*synth) code = cmd_synth(kind, frames, size, height, width, seed, vx, vy, out);
    if (*fit) code = cmd_fit(fit_ov, fit_video, fit_out);
    if (*render) code = cmd_render(render_ck, render_times, render_out);
    if (*eval) code = cmd_eval(eval_ck, eval_video, eval_mode, eval_window, eval_out);
    if (*compare) code = cmd_compare(cmp_ov, cmp_video, cmp_out);
    if (*gradcheck) code = cmd_gradcheck(gc_scope, gc_trials, gc_seed, gc_out, fault_op, fault_factor);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  } catch (const Failure& f) {
    std::fprintf(stderr, "error: %s\n", f.message.c_str());
    return f.exit_code;
  }
  return code;
}
