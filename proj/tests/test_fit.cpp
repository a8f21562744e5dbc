// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <limits>

#include "core/gradcheck.hpp"
#include "fit/comparison.hpp"
#include "fit/fit.hpp"
#include "io/synth.hpp"
#include "metrics/metrics.hpp"
#include "test_util.hpp"

using namespace vidfield;
using vidfield::testing::error_code_of;
using vidfield::testing::random_tensor;

namespace {

using Indices = std::vector<std::size_t>;

Video constant_video(std::size_t t, std::size_t h, std::size_t w) {
  io::SynthParams p;
  p.kind = "constant";
  p.frames = t;
  p.height = h;
  p.width = w;
  p.seed = 5;
  return io::synth_video(p);
}

RepConfig triplane(std::size_t t, std::size_t h, std::size_t w, std::size_t n, std::size_t c) {
  RepConfig r;
  r.frames = t;
  r.height = h;
  r.width = w;
  r.plane_resolution = n;
  r.plane_channels = c;
  r.decoder_hidden = 8;
  return r;
}

std::vector<Tensor> snapshot(const Representation& rep) {
  std::vector<Tensor> out;
  for (const auto& p : rep.parameters().all()) out.push_back(p.value);
  return out;
}

}  // namespace

TEST_CASE("holdout plans") {
  HoldoutPlan a = make_holdout(9, HoldoutMode::interpolation, 3);
  CHECK(a.train == Indices{0, 4, 8});
  CHECK(a.eval == Indices{1, 2, 3, 5, 6, 7});

  HoldoutPlan b = make_holdout(10, HoldoutMode::extrapolation, 3);
  CHECK(b.train == Indices{0, 1, 2, 3, 4, 5, 6});
  CHECK(b.eval == Indices{7, 8, 9});

  // The final frame is always kept for interpolation.
  HoldoutPlan c = make_holdout(10, HoldoutMode::interpolation, 3);
  CHECK(c.train == Indices{0, 4, 8, 9});

  for (std::size_t t = 3; t < 40; ++t)
    for (std::size_t k = 1; k + 1 < t; ++k)
      for (HoldoutMode m : {HoldoutMode::interpolation, HoldoutMode::extrapolation}) {
        HoldoutPlan p = make_holdout(t, m, k);
        Indices all = p.train;
        all.insert(all.end(), p.eval.begin(), p.eval.end());
        std::sort(all.begin(), all.end());
        REQUIRE(all.size() == t);
        for (std::size_t i = 0; i < t; ++i) REQUIRE(all[i] == i);
      }

  CHECK(error_code_of([] { make_holdout(5, HoldoutMode::interpolation, 5); }) == ErrorCode::invalid_argument);
  CHECK(error_code_of([] { make_holdout(5, HoldoutMode::extrapolation, 4); }) == ErrorCode::invalid_argument);
  CHECK(error_code_of([] { make_holdout(5, HoldoutMode::extrapolation, 0); }) == ErrorCode::invalid_argument);

  nlohmann::json j = a;
  HoldoutPlan back = holdout_from_json(j, 0);
  CHECK(back.train == a.train);
  CHECK(error_code_of([] { holdout_from_json({{"mode", "sideways"}}, 9); }) == ErrorCode::invalid_argument);
}

TEST_CASE("mse loss") {
  Tape tape;
  Tensor x({3, 3, 3}, real(0.2));
  CHECK(mse_loss(tape.leaf(x), x).value()[0] == 0);
  CHECK(mse_loss(tape.leaf(Tensor({2, 2, 3}, 0)), Tensor({2, 2, 3}, 1)).value()[0] == 1);
  CHECK(error_code_of([&] { mse_loss(tape.leaf(x), Tensor({3, 3, 1})); }) == ErrorCode::invalid_argument);

  Pcg32 rng(4);
  Tensor p = random_tensor({2, 3, 3}, rng), t = random_tensor({2, 3, 3}, rng);
  Tape t2;
  Var pv = t2.leaf(p);
  t2.backward(mse_loss(pv, t));
  Tensor g = t2.grad(pv);
  for (std::size_t i = 0; i < p.size(); ++i)
    CHECK(g[i] == doctest::Approx(2.0 * (p[i] - t[i]) / static_cast<double>(p.size())));
  auto report = finite_diff_check([&](Tape&, const std::vector<Var>& in) { return mse_loss(in[0], t); }, {p});
  CHECK(report.passed);
}

TEST_CASE("adam steps") {
  AdamHyper h;
  h.lr = 0.1;
  Tensor x = Tensor::from({0.0});
  AdamState s;
  adam_step(x, Tensor::from({1.0}), s, h);
  CHECK(x[0] == doctest::Approx(-0.1).epsilon(1e-6));

  Tensor y = Tensor::from({0.5, -2});
  AdamState sy;
  adam_step(y, Tensor({2}), sy, h);
  CHECK(y == Tensor::from({0.5, -2}));

  // f(x) = x^2 from x = 1: compare against a scalar re-derivation of Adam.
  Tensor z = Tensor::from({1.0});
  AdamState sz;
  double ref = 1, m = 0, v = 0;
  for (int k = 1; k <= 50; ++k) {
    adam_step(z, Tensor::from({2 * z[0]}), sz, h);
    const double g = 2 * ref;
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    ref -= 0.1 * (m / (1 - std::pow(0.9, k))) / (std::sqrt(v / (1 - std::pow(0.999, k))) + 1e-8);
  }
  CHECK(z[0] == doctest::Approx(ref).epsilon(1e-5));
  CHECK(std::abs(z[0]) < 0.1);

  Tensor bad = Tensor::from({1.0});
  AdamState sb;
  CHECK(error_code_of([&] { adam_step(bad, Tensor::from({std::numeric_limits<real>::infinity()}), sb, h); }) ==
        ErrorCode::numeric);
  CHECK(bad[0] == 1);
}

TEST_CASE("fit config JSON") {
  FitConfig c;
  c.steps = 12;
  c.adam.lr = 0.003;
  c.patience = 4;
  nlohmann::json j = c;
  FitConfig back = j.get<FitConfig>();
  CHECK(back.steps == 12);
  CHECK(back.adam.lr == 0.003);
  CHECK(back.patience == 4);
  CHECK(error_code_of([] { (void)nlohmann::json{{"stepz", 3}}.get<FitConfig>(); }) == ErrorCode::invalid_argument);
  FitConfig zero_batch;
  zero_batch.batch = 0;
  CHECK(error_code_of([&] { zero_batch.validate(); }) == ErrorCode::invalid_argument);
}

TEST_CASE("constant video smoke fit") {
  Video video = constant_video(8, 16, 16);
  auto rep = make_representation(triplane(8, 16, 16, 8, 4));
  HoldoutPlan plan = make_holdout(8, HoldoutMode::interpolation, 1);
  FitConfig cfg;
  cfg.steps = 500;
  FitReport r = fit(*rep, video, plan, cfg);
  CHECK(r.steps_run == 500);
  CHECK(r.loss.size() == 500);
  CHECK(r.mean_train_psnr >= 40.0);
  CHECK(r.train.size() == plan.train.size());
  CHECK(r.eval.size() == plan.eval.size());

  // Best-so-far loss at 100-step checkpoints never increases.
  double best = std::numeric_limits<double>::infinity(), last_checkpoint = best;
  for (std::size_t i = 0; i < r.loss.size(); ++i) {
    best = std::min(best, r.loss[i]);
    if ((i + 1) % 100 == 0) {
      CHECK(best <= last_checkpoint);
      last_checkpoint = best;
    }
  }
  CHECK(r.loss.back() < r.loss.front());

  CHECK(metrics::psnr(rep->render_frame(frame_time(2, 8)), video.frame(2)) >= 40.0);

  nlohmann::json j = r;
  CHECK(j["schema_version"] == kReportSchemaVersion);
  CHECK(j["loss"].size() == 500);
  CHECK(loss_curve_csv(r).rfind("step,loss\n0,", 0) == 0);
}

TEST_CASE("zero steps only evaluates") {
  Video video = constant_video(4, 12, 12);
  auto rep = make_representation(triplane(4, 12, 12, 4, 2));
  auto before = snapshot(*rep);
  FitConfig cfg;
  cfg.steps = 0;
  FitReport r = fit(*rep, video, make_holdout(4, HoldoutMode::extrapolation, 1), cfg);
  CHECK(r.steps_run == 0);
  CHECK(r.loss.empty());
  CHECK(snapshot(*rep) == before);
  CHECK(r.train.size() == 3);
  CHECK(r.eval[0].index == 3);
  CHECK(r.eval[0].psnr == doctest::Approx(metrics::psnr(rep->render_frame(1), video.frame(3))));
}

TEST_CASE("fit determinism and eval isolation") {
  io::SynthParams p;
  p.kind = "translating_square";
  p.frames = 6;
  p.height = 12;
  p.width = 12;
  Video video = io::synth_video(p);
  HoldoutPlan plan = make_holdout(6, HoldoutMode::extrapolation, 2);
  FitConfig cfg;
  cfg.steps = 30;
  cfg.batch = 2;
  RepConfig rc = triplane(6, 12, 12, 4, 2);

  auto a = make_representation(rc), b = make_representation(rc);
  FitReport ra = fit(*a, video, plan, cfg);
  FitReport rb = fit(*b, video, plan, cfg);
  CHECK(ra.loss == rb.loss);
  CHECK(snapshot(*a) == snapshot(*b));

  // Changing held-out frames must not change the fitted parameters.
  Video perturbed = video;
  for (std::size_t k : plan.eval) perturbed.set_frame(k, Tensor({12, 12, 3}, real(0.9)));
  auto c = make_representation(rc);
  FitReport rcp = fit(*c, perturbed, plan, cfg);
  CHECK(rcp.loss == ra.loss);
  CHECK(snapshot(*c) == snapshot(*a));
  CHECK(rcp.mean_eval_psnr != ra.mean_eval_psnr);

  // A different seed draws different batches.
  FitConfig other = cfg;
  other.seed = cfg.seed + 1;
  auto d = make_representation(rc);
  CHECK(fit(*d, video, plan, other).loss != ra.loss);
}

TEST_CASE("fit rejects bad geometry") {
  Video video = constant_video(4, 12, 12);
  auto rep = make_representation(triplane(4, 12, 10, 4, 2));
  CHECK(error_code_of([&] { fit(*rep, video, make_holdout(4, HoldoutMode::interpolation, 1), FitConfig{}); }) ==
        ErrorCode::invalid_argument);
  auto ok = make_representation(triplane(4, 12, 12, 4, 2));
  CHECK(error_code_of([&] { fit(*ok, video, make_holdout(5, HoldoutMode::interpolation, 1), FitConfig{}); }) ==
        ErrorCode::invalid_argument);
}

TEST_CASE("divergence is reported with the last finite loss") {
  Video video = constant_video(4, 8, 8);
  auto rep = make_representation(triplane(4, 8, 8, 4, 2));
  FitConfig cfg;
  cfg.steps = 10;
  struct FaultGuard {
    FaultGuard() { set_gradient_fault("sigmoid", std::numeric_limits<real>::infinity()); }
    ~FaultGuard() { clear_gradient_fault(); }
  } guard;
  try {
    fit(*rep, video, make_holdout(4, HoldoutMode::interpolation, 1), cfg);
    FAIL("fit should diverge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::divergence);
    CHECK(std::string(e.what()).find("last finite loss") != std::string::npos);
  }
}

TEST_CASE("patience stops early") {
  Video video = constant_video(4, 8, 8);
  auto rep = make_representation(triplane(4, 8, 8, 4, 2));
  FitConfig cfg;
  cfg.steps = 5000;
  cfg.adam.lr = 0.5;
  cfg.patience = 5;
  FitReport r = fit(*rep, video, make_holdout(4, HoldoutMode::interpolation, 1), cfg);
  CHECK(r.early_stopped);
  CHECK(r.steps_run < 5000);
  CHECK(r.loss.size() == r.steps_run);
}

TEST_CASE("comparison table") {
  RepConfig ref = triplane(6, 12, 12, 8, 4);
  auto configs = comparison_configs(ref, all_families());
  REQUIRE(configs.size() == 4);
  const auto ref_params = make_representation(ref)->param_count();
  for (const auto& c : configs) {
    const double err = std::abs(static_cast<double>(make_representation(c)->param_count()) - ref_params) /
                       static_cast<double>(ref_params);
    CHECK(err <= 0.05);
  }

  // Off-budget row gets rejected; an invalid row fails without stopping the others.
  RepConfig big = ref;
  big.plane_resolution = 12;
  configs.push_back(big);
  RepConfig broken = ref;
  broken.frames = 7;
  configs.push_back(broken);

  io::SynthParams p;
  p.kind = "translating_texture";
  p.frames = 6;
  p.height = 12;
  p.width = 12;
  Video video = io::synth_video(p);
  FitConfig cfg;
  cfg.steps = 3;
  ComparisonTable t = run_comparison(video, ref, configs, make_holdout(6, HoldoutMode::interpolation, 1), cfg);
  REQUIRE(t.rows.size() == 6);
  for (std::size_t i = 0; i < 4; ++i) CHECK(t.rows[i].status == "ok");
  CHECK(t.rows[4].status == "rejected");
  CHECK(t.rows[5].status == "failed");
  CHECK_FALSE(t.rows[5].message.empty());
  CHECK(t.find(Family::voxel) != nullptr);

  const std::string csv = comparison_csv(t);
  CHECK(csv.rfind("family,params,budget_error,ssim,psnr,status\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
  nlohmann::json j = t;
  CHECK(j["rows"].size() == 6);

  RepConfig voxel_ref = ref;
  voxel_ref.family = Family::voxel;
  CHECK(error_code_of([&] { comparison_configs(voxel_ref, all_families()); }) == ErrorCode::invalid_argument);
}
