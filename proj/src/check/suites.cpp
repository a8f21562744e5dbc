// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#include "check/suites.hpp"

#include <functional>
#include <string>
#include <utility>

#include "core/ops.hpp"
#include "fit/fit.hpp"
#include "motion/flow_triplane.hpp"
#include "motion/warp.hpp"

namespace vidfield {

std::string to_string(GradScope s) {
  switch (s) {
    case GradScope::primitives: return "primitives";
    case GradScope::warp: return "warp";
    case GradScope::end2end: return "end2end";
  }
  return "?";
}

GradScope grad_scope_from_string(const std::string& s) {
  if (s == "primitives") return GradScope::primitives;
  if (s == "warp") return GradScope::warp;
  if (s == "end2end") return GradScope::end2end;
  fail(ErrorCode::invalid_argument, "unknown gradcheck scope '" + s + "' (expected primitives, warp or end2end)");
}

namespace {

Tensor uniform(Shape shape, Pcg32& rng, real lo = -1, real hi = 1) {
  Tensor t(std::move(shape));
  for (auto& v : t.data()) v = static_cast<real>(rng.uniform(lo, hi));
  return t;
}

// Magnitudes in [0.05, 1] with random sign.
Tensor away_from_zero(Shape shape, Pcg32& rng) {
  Tensor t(std::move(shape));
  for (auto& v : t.data()) {
    const real m = static_cast<real>(rng.uniform(0.05, 1.0));
    v = rng.below(2) ? m : -m;
  }
  return t;
}

// Positive values in [0.5, 1.5] (divisors).
Tensor positive(Shape shape, Pcg32& rng) { return uniform(std::move(shape), rng, real(0.5), real(1.5)); }

// A coordinate in [0, extent - 1] whose fractional part is in [0.05, 0.95].
real grid_coord(std::size_t extent, Pcg32& rng) {
  const auto cell = rng.below(static_cast<std::uint32_t>(extent - 1));
  return static_cast<real>(cell) + static_cast<real>(rng.uniform(0.05, 0.95));
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

class Suite {
 public:
  explicit Suite(const SuiteOptions& opts) : opts_(opts) {}

  // Runs `trial(rng, check_options)` for every trial and merges the reports
  // under `name`.
  void run(const std::string& name, const std::function<CheckReport(Pcg32&, const CheckOptions&)>& trial) {
    CheckReport merged;
    merged.name = name;
    merged.tolerance = opts_.check.tolerance;
    merged.trials = 0;
    for (std::size_t i = 0; i < opts_.trials; ++i) {
      Pcg32 rng(opts_.seed, fnv1a(name) ^ i);
      CheckOptions co = opts_.check;
      co.seed = opts_.seed + i;
      CheckReport r = trial(rng, co);
      merged.merge(r);
    }
    reports_.push_back(std::move(merged));
  }

  // Common case: leaf inputs built by `make`.
  void leaves(const std::string& name, const std::function<std::vector<Tensor>(Pcg32&)>& make,
              const std::function<Var(Tape&, const std::vector<Var>&)>& fn) {
    run(name, [&](Pcg32& rng, const CheckOptions& co) {
      std::vector<Tensor> inputs = make(rng);
      return finite_diff_check(fn, std::move(inputs), co);
    });
  }

  std::vector<CheckReport> take() { return std::move(reports_); }

 private:
  SuiteOptions opts_;
  std::vector<CheckReport> reports_;
};

void primitives(Suite& s) {
  using ops::Elementwise;
  const Elementwise binary[] = {Elementwise::add, Elementwise::sub, Elementwise::mul, Elementwise::div};
  for (Elementwise k : binary) {
    s.leaves(
        ops::to_string(k),
        [k](Pcg32& rng) {
          Tensor b = k == Elementwise::div ? positive({3, 4}, rng) : uniform({3, 4}, rng);
          return std::vector<Tensor>{uniform({3, 4}, rng), b};
        },
        [k](Tape&, const std::vector<Var>& in) { return ops::elementwise(k, in[0], in[1]); });
    s.leaves(
        std::string(ops::to_string(k)) + "_broadcast",
        [k](Pcg32& rng) {
          Tensor b = k == Elementwise::div ? positive({1}, rng) : uniform({1}, rng);
          return std::vector<Tensor>{uniform({2, 5}, rng), b};
        },
        [k](Tape&, const std::vector<Var>& in) { return ops::elementwise(k, in[0], in[1]); });
  }
  s.leaves(
      "scalar_arith", [](Pcg32& rng) { return std::vector<Tensor>{uniform({6}, rng)}; },
      [](Tape&, const std::vector<Var>& in) {
        Var a = ops::add(in[0], real(0.3));
        a = ops::mul(a, real(-1.7));
        a = ops::elementwise(ops::Elementwise::sub, a, real(0.2));
        a = ops::elementwise(ops::Elementwise::div, a, real(1.3));
        return ops::rsub(real(0.5), a);
      });
  const Elementwise unary[] = {Elementwise::leaky_relu, Elementwise::sigmoid, Elementwise::tanh, Elementwise::square};
  for (Elementwise k : unary)
    s.leaves(
        ops::to_string(k), [](Pcg32& rng) { return std::vector<Tensor>{away_from_zero({4, 3}, rng)}; },
        [k](Tape&, const std::vector<Var>& in) { return ops::elementwise(k, in[0]); });

  s.leaves(
      "sum", [](Pcg32& rng) { return std::vector<Tensor>{uniform({3, 3}, rng)}; },
      [](Tape&, const std::vector<Var>& in) { return ops::mul(ops::square(ops::sum(in[0])), real(0.5)); });
  s.leaves(
      "mean", [](Pcg32& rng) { return std::vector<Tensor>{uniform({2, 5}, rng)}; },
      [](Tape&, const std::vector<Var>& in) { return ops::square(ops::mean(in[0])); });
  s.leaves(
      "matmul", [](Pcg32& rng) { return std::vector<Tensor>{uniform({3, 4}, rng), uniform({4, 5}, rng)}; },
      [](Tape&, const std::vector<Var>& in) { return ops::matmul(in[0], in[1]); });
  s.leaves(
      "add_bias", [](Pcg32& rng) { return std::vector<Tensor>{uniform({2, 3, 4}, rng), uniform({4}, rng)}; },
      [](Tape&, const std::vector<Var>& in) { return ops::add_bias(in[0], in[1]); });
  s.leaves(
      "conv2d_3x3",
      [](Pcg32& rng) {
        return std::vector<Tensor>{uniform({4, 4, 2}, rng), uniform({3, 3, 2, 3}, rng), uniform({3}, rng)};
      },
      [](Tape&, const std::vector<Var>& in) { return ops::conv2d(in[0], in[1], in[2]); });
  s.leaves(
      "conv2d_1x1",
      [](Pcg32& rng) {
        return std::vector<Tensor>{uniform({3, 5, 3}, rng), uniform({1, 1, 3, 2}, rng), uniform({2}, rng)};
      },
      [](Tape&, const std::vector<Var>& in) { return ops::conv2d(in[0], in[1], in[2]); });
  s.leaves(
      "reshape", [](Pcg32& rng) { return std::vector<Tensor>{uniform({2, 6}, rng)}; },
      [](Tape&, const std::vector<Var>& in) { return ops::reshape(in[0], {3, 4}); });
  s.leaves(
      "concat_last",
      [](Pcg32& rng) { return std::vector<Tensor>{uniform({3, 2}, rng), uniform({3, 1}, rng), uniform({3, 3}, rng)}; },
      [](Tape&, const std::vector<Var>& in) { return ops::concat_last(in); });
  s.leaves(
      "slice_last", [](Pcg32& rng) { return std::vector<Tensor>{uniform({3, 5}, rng)}; },
      [](Tape&, const std::vector<Var>& in) { return ops::slice_last(in[0], 1, 4); });
  s.leaves(
      "broadcast_last", [](Pcg32& rng) { return std::vector<Tensor>{uniform({4, 1}, rng)}; },
      [](Tape&, const std::vector<Var>& in) { return ops::broadcast_last(in[0], 3); });
  s.leaves(
      "weighted_sum", [](Pcg32& rng) { return std::vector<Tensor>{uniform({2, 3}, rng), uniform({2, 3}, rng)}; },
      [](Tape&, const std::vector<Var>& in) {
        const real w[] = {real(0.3), real(-1.2)};
        return ops::weighted_sum(in, w);
      });
  s.leaves(
      "bilinear_sample2d",
      [](Pcg32& rng) {
        const std::size_t n = 5, points = 6;
        Tensor coords({points, 2});
        for (std::size_t p = 0; p < points; ++p) {
          coords[p * 2] = grid_coord(n, rng);
          coords[p * 2 + 1] = grid_coord(n, rng);
        }
        return std::vector<Tensor>{uniform({n, n, 3}, rng), coords};
      },
      [](Tape&, const std::vector<Var>& in) { return ops::bilinear_sample2d(in[0], in[1]); });
  s.leaves(
      "trilinear_sample3d",
      [](Pcg32& rng) {
        const std::size_t n = 4, points = 5;
        Tensor coords({points, 3});
        for (std::size_t p = 0; p < points; ++p)
          for (std::size_t a = 0; a < 3; ++a) coords[p * 3 + a] = grid_coord(n, rng);
        return std::vector<Tensor>{uniform({n, n, n, 2}, rng), coords};
      },
      [](Tape&, const std::vector<Var>& in) { return ops::trilinear_sample3d(in[0], in[1]); });
}

// A flow whose displaced positions p + flow sit at least 0.05 from integer
// cell coordinates; some land outside the grid.
Tensor offgrid_flow(std::size_t n, Pcg32& rng) {
  Tensor flow({n, n, 2});
  for (auto& v : flow.data()) {
    const real whole = static_cast<real>(static_cast<int>(rng.below(5)) - 2);
    v = whole + static_cast<real>(rng.uniform(0.05, 0.95));
  }
  return flow;
}

RepConfig tiny_config(Family family, std::uint64_t seed) {
  RepConfig c;
  c.family = family;
  c.frames = 3;
  c.height = 6;
  c.width = 5;
  c.seed = seed;
  c.plane_resolution = 4;
  c.plane_channels = 2;
  c.voxel_resolution = 3;
  c.voxel_channels = 2;
  c.num_frequencies = 2;
  c.mlp_hidden = 5;
  c.mlp_depth = 2;
  c.decoder_hidden = 3;
  c.global_channels = 2;
  c.motion_channels = 2;
  c.flow_hidden = 4;
  return c;
}

// Gradient of `fn` with respect to every parameter of `rep`.
CheckReport param_check(Representation& rep, const CheckOptions& co, const std::function<Var(Tape&)>& fn) {
  return finite_diff_check(fn, rep.parameters(), co);
}

void warp(Suite& s) {
  s.leaves(
      "forward_warp",
      [](Pcg32& rng) {
        const std::size_t n = 5;
        return std::vector<Tensor>{uniform({n, n, 2}, rng), offgrid_flow(n, rng)};
      },
      [](Tape&, const std::vector<Var>& in) { return forward_warp(in[0], in[1]); });
  // The flow decoder alone (motion planes and MLP weights), then the full
  // warp-and-blend recurrence. Parameters are re-randomized per trial.
  s.run("flow_decoder", [](Pcg32& rng, const CheckOptions& co) {
    FlowTriPlaneRep rep(tiny_config(Family::triplane_flow, rng.next_u32()));
    const std::size_t step = 1 + rng.below(2);
    return param_check(rep, co, [&](Tape& tape) {
      FlowFieldVars f = rep.decode_flow(tape, step);
      return ops::concat_last({f.local, f.global, f.mask});
    });
  });
  s.run("appearance_recurrence", [](Pcg32& rng, const CheckOptions& co) {
    FlowTriPlaneRep rep(tiny_config(Family::triplane_flow, rng.next_u32()));
    return param_check(rep, co, [&](Tape& tape) {
      auto slices = rep.appearance_recurrence(tape, rep.feature_frames() - 1);
      return ops::concat_last(slices);
    });
  });
}

void end2end(Suite& s) {
  const Family families[] = {Family::triplane, Family::voxel, Family::posenc, Family::triplane_flow};
  for (Family f : families) {
    s.run("render_mse_" + to_string(f), [f](Pcg32& rng, const CheckOptions& co) {
      RepConfig c = tiny_config(f, rng.next_u32());
      auto rep = make_representation(c);
      Tensor target = uniform({c.height, c.width, 3}, rng, 0, 1);
      // Times between frame slices exercise the temporal interpolation.
      const real t = static_cast<real>(rng.uniform(0.05, 0.45));
      return finite_diff_check([&](Tape& tape) { return mse_loss(rep->render(tape, t), target); }, rep->parameters(),
                               co);
    });
  }
}

}  // namespace

std::vector<CheckReport> run_gradcheck_suite(GradScope scope, const SuiteOptions& opts) {
  require(opts.trials >= 1, "gradcheck: need at least one trial");
  Suite suite(opts);
  switch (scope) {
    case GradScope::primitives: primitives(suite); break;
    case GradScope::warp: warp(suite); break;
    case GradScope::end2end: end2end(suite); break;
  }
  return suite.take();
}

}  // namespace vidfield
