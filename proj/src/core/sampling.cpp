// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "core/ops.hpp"

namespace vidfield::ops {

namespace {

// Interpolation cell along one axis of extent n >= 2. `frac` is the weight of
// cell lo + 1; `live` is false when the coordinate was clamped, which zeroes
// the coordinate derivative.
struct AxisCell {
  std::size_t lo;
  real frac;
  bool live;
};

AxisCell locate(real p, std::size_t n) {
  const real top = static_cast<real>(n - 1);
  if (!(p >= 0)) return {0, 0, false};
  if (p > top) return {n - 2, 1, false};
  auto lo = static_cast<std::size_t>(std::floor(p));
  if (lo > n - 2) lo = n - 2;
  return {lo, p - static_cast<real>(lo), true};
}

}  // namespace

Var bilinear_sample2d(Var plane, Var coords) {
  const Tensor& pv = plane.value();
  const Tensor& cv = coords.value();
  require(pv.rank() == 3, "bilinear_sample2d: plane must be rank 3, got " + shape_string(pv.shape()));
  require(pv.dim(0) >= 2 && pv.dim(1) >= 2, "bilinear_sample2d: plane extent must be >= 2");
  require(cv.rank() == 2 && cv.dim(1) == 2, "bilinear_sample2d: coords must be P x 2");
  const std::size_t rows = pv.dim(0), cols = pv.dim(1), c = pv.dim(2), np = cv.dim(0);

  Tensor out({np, c});
  const real* P = pv.ptr();
  for (std::size_t i = 0; i < np; ++i) {
    const AxisCell ax = locate(cv[2 * i], cols);
    const AxisCell ay = locate(cv[2 * i + 1], rows);
    const real w00 = (1 - ax.frac) * (1 - ay.frac), w01 = ax.frac * (1 - ay.frac);
    const real w10 = (1 - ax.frac) * ay.frac, w11 = ax.frac * ay.frac;
    const real* v00 = P + (ay.lo * cols + ax.lo) * c;
    const real* v01 = v00 + c;
    const real* v10 = v00 + cols * c;
    const real* v11 = v10 + c;
    real* o = out.ptr() + i * c;
    for (std::size_t k = 0; k < c; ++k) o[k] = w00 * v00[k] + w01 * v01[k] + w10 * v10[k] + w11 * v11[k];
  }

  return plane.tape().record(
      "bilinear_sample2d", std::move(out), {plane, coords},
      [plane, coords, rows, cols, c, np](Tape& tape, const Tensor& g, const Tensor&) {
        const Tensor& pv = plane.value();
        const Tensor& cv = coords.value();
        const real* P = pv.ptr();
        real* GP = plane.requires_grad() ? tape.grad_ref(plane).ptr() : nullptr;
        real* GC = coords.requires_grad() ? tape.grad_ref(coords).ptr() : nullptr;
        for (std::size_t i = 0; i < np; ++i) {
          const AxisCell ax = locate(cv[2 * i], cols);
          const AxisCell ay = locate(cv[2 * i + 1], rows);
          const std::size_t base = (ay.lo * cols + ax.lo) * c;
          const real* go = g.ptr() + i * c;
          if (GP) {
            const real w00 = (1 - ax.frac) * (1 - ay.frac), w01 = ax.frac * (1 - ay.frac);
            const real w10 = (1 - ax.frac) * ay.frac, w11 = ax.frac * ay.frac;
            real* g00 = GP + base;
            real* g01 = g00 + c;
            real* g10 = g00 + cols * c;
            real* g11 = g10 + c;
            for (std::size_t k = 0; k < c; ++k) {
              g00[k] += w00 * go[k];
              g01[k] += w01 * go[k];
              g10[k] += w10 * go[k];
              g11[k] += w11 * go[k];
            }
          }
          if (GC && (ax.live || ay.live)) {
            const real* v00 = P + base;
            const real* v01 = v00 + c;
            const real* v10 = v00 + cols * c;
            const real* v11 = v10 + c;
            real dx = 0, dy = 0;
            for (std::size_t k = 0; k < c; ++k) {
              dx += go[k] * ((1 - ay.frac) * (v01[k] - v00[k]) + ay.frac * (v11[k] - v10[k]));
              dy += go[k] * ((1 - ax.frac) * (v10[k] - v00[k]) + ax.frac * (v11[k] - v01[k]));
            }
            if (ax.live) GC[2 * i] += dx;
            if (ay.live) GC[2 * i + 1] += dy;
          }
        }
      });
}

Var trilinear_sample3d(Var volume, Var coords) {
  const Tensor& vv = volume.value();
  const Tensor& cv = coords.value();
  require(vv.rank() == 4, "trilinear_sample3d: volume must be rank 4, got " + shape_string(vv.shape()));
  require(vv.dim(0) >= 2 && vv.dim(1) >= 2 && vv.dim(2) >= 2, "trilinear_sample3d: volume extent must be >= 2");
  require(cv.rank() == 2 && cv.dim(1) == 3, "trilinear_sample3d: coords must be P x 3");
  const std::size_t nz = vv.dim(0), ny = vv.dim(1), nx = vv.dim(2), c = vv.dim(3), np = cv.dim(0);
  const std::size_t sy = nx * c, sz = ny * nx * c;

  Tensor out({np, c});
  const real* V = vv.ptr();
  for (std::size_t i = 0; i < np; ++i) {
    const AxisCell ax = locate(cv[3 * i], nx);
    const AxisCell ay = locate(cv[3 * i + 1], ny);
    const AxisCell az = locate(cv[3 * i + 2], nz);
    const real* b = V + az.lo * sz + ay.lo * sy + ax.lo * c;
    const real wx[2] = {1 - ax.frac, ax.frac}, wy[2] = {1 - ay.frac, ay.frac}, wz[2] = {1 - az.frac, az.frac};
    real* o = out.ptr() + i * c;
    for (int dz = 0; dz < 2; ++dz)
      for (int dy = 0; dy < 2; ++dy)
        for (int dx = 0; dx < 2; ++dx) {
          const real wgt = wz[dz] * wy[dy] * wx[dx];
          const real* v = b + dz * sz + dy * sy + dx * c;
          for (std::size_t k = 0; k < c; ++k) o[k] += wgt * v[k];
        }
  }

  return volume.tape().record(
      "trilinear_sample3d", std::move(out), {volume, coords},
      [volume, coords, nx, ny, nz, c, np, sy, sz](Tape& tape, const Tensor& g, const Tensor&) {
        const real* V = volume.value().ptr();
        const Tensor& cv = coords.value();
        real* GV = volume.requires_grad() ? tape.grad_ref(volume).ptr() : nullptr;
        real* GC = coords.requires_grad() ? tape.grad_ref(coords).ptr() : nullptr;
        for (std::size_t i = 0; i < np; ++i) {
          const AxisCell a[3] = {locate(cv[3 * i], nx), locate(cv[3 * i + 1], ny), locate(cv[3 * i + 2], nz)};
          const std::size_t base = a[2].lo * sz + a[1].lo * sy + a[0].lo * c;
          const real w[3][2] = {{1 - a[0].frac, a[0].frac}, {1 - a[1].frac, a[1].frac}, {1 - a[2].frac, a[2].frac}};
          // d(weight)/d(frac) per axis is -1 for the low cell and +1 for the high cell.
          const real dw[2] = {-1, 1};
          const real* go = g.ptr() + i * c;
          real dc[3] = {0, 0, 0};
          for (int dz = 0; dz < 2; ++dz)
            for (int dy = 0; dy < 2; ++dy)
              for (int dx = 0; dx < 2; ++dx) {
                const std::size_t off = base + dz * sz + dy * sy + dx * c;
                const real wgt = w[2][dz] * w[1][dy] * w[0][dx];
                if (GV)
                  for (std::size_t k = 0; k < c; ++k) GV[off + k] += wgt * go[k];
                if (GC) {
                  real dot = 0;
                  for (std::size_t k = 0; k < c; ++k) dot += go[k] * V[off + k];
                  dc[0] += dot * dw[dx] * w[1][dy] * w[2][dz];
                  dc[1] += dot * w[0][dx] * dw[dy] * w[2][dz];
                  dc[2] += dot * w[0][dx] * w[1][dy] * dw[dz];
                }
              }
          if (GC)
            for (int ax = 0; ax < 3; ++ax)
              if (a[ax].live) GC[3 * i + ax] += dc[ax];
        }
      });
}

Var bilinear_sample2d(Var plane, real px, real py) {
  Var at = plane.tape().constant(Tensor({1, 2}, std::vector<real>{px, py}));
  Var s = bilinear_sample2d(plane, at);
  return reshape(s, {s.shape()[1]});
}

Var trilinear_sample3d(Var volume, real px, real py, real pz) {
  Var at = volume.tape().constant(Tensor({1, 3}, std::vector<real>{px, py, pz}));
  Var s = trilinear_sample3d(volume, at);
  return reshape(s, {s.shape()[1]});
}

}  // namespace vidfield::ops
