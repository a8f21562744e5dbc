// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#include "motion/warp.hpp"

#include <cmath>

namespace vidfield {

namespace {

void check_geometry(const Tensor& features, const Tensor& flow) {
  require(features.rank() == 3, "forward_warp: features must be H x W x C, got " + shape_string(features.shape()));
  require(flow.rank() == 3 && flow.dim(2) == 2 && flow.dim(0) == features.dim(0) && flow.dim(1) == features.dim(1),
          "forward_warp: flow " + shape_string(flow.shape()) + " does not match features " +
              shape_string(features.shape()));
  if (!flow.all_finite()) fail(ErrorCode::numeric, "forward_warp: non-finite flow");
}

// One bilinear footprint of a displaced source cell.
struct Footprint {
  long x0, y0;
  real fx, fy;
};

Footprint footprint(std::size_t i, std::size_t j, const real* f) {
  const real tx = static_cast<real>(j) + f[0];
  const real ty = static_cast<real>(i) + f[1];
  const real x0 = std::floor(tx), y0 = std::floor(ty);
  return {static_cast<long>(x0), static_cast<long>(y0), tx - x0, ty - y0};
}

// Calls visit(target_index, weight, dweight_dfx, dweight_dfy) for each in-grid corner.
template <typename Visit>
void for_each_corner(const Footprint& fp, std::size_t h, std::size_t w, Visit&& visit) {
  for (int a = 0; a < 2; ++a) {
    const long y = fp.y0 + a;
    if (y < 0 || y >= static_cast<long>(h)) continue;
    const real wy = a ? fp.fy : 1 - fp.fy;
    const real dwy = a ? real(1) : real(-1);
    for (int b = 0; b < 2; ++b) {
      const long x = fp.x0 + b;
      if (x < 0 || x >= static_cast<long>(w)) continue;
      const real wx = b ? fp.fx : 1 - fp.fx;
      const real dwx = b ? real(1) : real(-1);
      visit(static_cast<std::size_t>(y) * w + static_cast<std::size_t>(x), wx * wy, dwx * wy, wx * dwy);
    }
  }
}

}  // namespace

SplatResult splat(const Tensor& features, const Tensor& flow) {
  check_geometry(features, flow);
  const std::size_t h = features.dim(0), w = features.dim(1), c = features.dim(2);
  SplatResult r{Tensor({h, w, c}), Tensor({h, w, 1})};
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < w; ++j) {
      const std::size_t src = i * w + j;
      const real* fs = features.ptr() + src * c;
      for_each_corner(footprint(i, j, flow.ptr() + 2 * src), h, w, [&](std::size_t t, real wt, real, real) {
        if (wt == 0) return;
        real* acc = r.accumulated.ptr() + t * c;
        for (std::size_t k = 0; k < c; ++k) acc[k] += wt * fs[k];
        r.weights[t] += wt;
      });
    }
  return r;
}

Var forward_warp(Var features, Var flow) {
  SplatResult s = splat(features.value(), flow.value());
  const std::size_t h = features.shape()[0], w = features.shape()[1], c = features.shape()[2];
  Tensor out({h, w, c});
  for (std::size_t t = 0; t < h * w; ++t) {
    const real wt = s.weights[t];
    if (wt < kSplatEpsilon) continue;
    for (std::size_t k = 0; k < c; ++k) out[t * c + k] = s.accumulated[t * c + k] / wt;
  }
  Tensor weights = std::move(s.weights);
  return features.tape().record(
      "forward_warp", std::move(out), {features, flow},
      [features, flow, weights = std::move(weights), h, w, c](Tape& tape, const Tensor& g, const Tensor& out) {
        // out = A / W per target; dL/dA = g / W, dL/dW = -sum_c g * out / W.
        Tensor dA({h * w, c});
        std::vector<real> dW(h * w, 0);
        for (std::size_t t = 0; t < h * w; ++t) {
          const real wt = weights[t];
          if (wt < kSplatEpsilon) continue;
          real acc = 0;
          for (std::size_t k = 0; k < c; ++k) {
            dA[t * c + k] = g[t * c + k] / wt;
            acc += g[t * c + k] * out[t * c + k];
          }
          dW[t] = -acc / wt;
        }
        const Tensor& fv = features.value();
        const Tensor& flv = flow.value();
        real* GF = features.requires_grad() ? tape.grad_ref(features).ptr() : nullptr;
        real* GFL = flow.requires_grad() ? tape.grad_ref(flow).ptr() : nullptr;
        for (std::size_t i = 0; i < h; ++i)
          for (std::size_t j = 0; j < w; ++j) {
            const std::size_t src = i * w + j;
            const real* fs = fv.ptr() + src * c;
            real gx = 0, gy = 0;
            for_each_corner(footprint(i, j, flv.ptr() + 2 * src), h, w,
                            [&](std::size_t t, real wt, real dwx, real dwy) {
              if (weights[t] < kSplatEpsilon) return;
              const real* da = dA.ptr() + t * c;
              real dot = 0;
              for (std::size_t k = 0; k < c; ++k) dot += da[k] * fs[k];
              if (GF && wt != 0) {
                real* gf = GF + src * c;
                for (std::size_t k = 0; k < c; ++k) gf[k] += wt * da[k];
              }
              const real dweight = dot + dW[t];
              gx += dwx * dweight;
              gy += dwy * dweight;
            });
            if (GFL) {
              GFL[2 * src] += gx;
              GFL[2 * src + 1] += gy;
            }
          }
      });
}

}  // namespace vidfield
