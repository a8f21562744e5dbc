// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#include <vector>

#include "core/kernels.hpp"
#include "core/ops.hpp"

namespace vidfield::ops {

Var conv2d(Var input, Var kernel, Var bias) {
  const Tensor& in = input.value();
  const Tensor& kw = kernel.value();
  const Tensor& bv = bias.value();
  require(in.rank() == 3, "conv2d: input must be H x W x Cin, got " + shape_string(in.shape()));
  require(kw.rank() == 4 && kw.dim(0) == kw.dim(1) && (kw.dim(0) == 1 || kw.dim(0) == 3),
          "conv2d: kernel must be 1x1xCinxCout or 3x3xCinxCout, got " + shape_string(kw.shape()));
  const std::size_t h = in.dim(0), w = in.dim(1), cin = in.dim(2);
  const std::size_t k = kw.dim(0), cout = kw.dim(3);
  require(kw.dim(2) == cin, "conv2d: kernel expects " + std::to_string(kw.dim(2)) + " input channels, got " +
                                std::to_string(cin));
  require(bv.rank() == 1 && bv.dim(0) == cout, "conv2d: bias must have length Cout");
  const long pad = static_cast<long>(k / 2);

  Tensor out({h, w, cout});
  const real* X = in.ptr();
  const real* K = kw.ptr();
  real* Y = out.ptr();
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      real* o = Y + (y * w + x) * cout;
      for (std::size_t co = 0; co < cout; ++co) o[co] = bv[co];
      for (std::size_t ky = 0; ky < k; ++ky) {
        const long iy = static_cast<long>(y + ky) - pad;
        if (iy < 0 || iy >= static_cast<long>(h)) continue;
        for (std::size_t kx = 0; kx < k; ++kx) {
          const long ix = static_cast<long>(x + kx) - pad;
          if (ix < 0 || ix >= static_cast<long>(w)) continue;
          const real* px = X + (static_cast<std::size_t>(iy) * w + static_cast<std::size_t>(ix)) * cin;
          const real* wk = K + (ky * k + kx) * cin * cout;
          detail::axpy_rows(o, px, wk, cin, cout);
        }
      }
    }
  }

  return input.tape().record(
      "conv2d", std::move(out), {input, kernel, bias},
      [input, kernel, bias, h, w, cin, cout, k, pad](Tape& tape, const Tensor& g, const Tensor&) {
        const real* X = input.value().ptr();
        const real* K = kernel.value().ptr();
        const real* G = g.ptr();
        if (bias.requires_grad()) {
          Tensor& gb = tape.grad_ref(bias);
          for (std::size_t p = 0; p < h * w; ++p)
            for (std::size_t co = 0; co < cout; ++co) gb[co] += G[p * cout + co];
        }
        const bool want_k = kernel.requires_grad();
        const bool want_x = input.requires_grad();
        if (!want_k && !want_x) return;
        real* GK = want_k ? tape.grad_ref(kernel).ptr() : nullptr;
        real* GX = want_x ? tape.grad_ref(input).ptr() : nullptr;
        // Transposed taps (k, k, Cout, Cin) so the input gradient is an axpy over Cin.
        std::vector<real> kt;
        if (want_x) {
          kt.resize(k * k * cout * cin);
          for (std::size_t t = 0; t < k * k; ++t)
            for (std::size_t ci = 0; ci < cin; ++ci)
              for (std::size_t co = 0; co < cout; ++co)
                kt[(t * cout + co) * cin + ci] = K[(t * cin + ci) * cout + co];
        }
        for (std::size_t y = 0; y < h; ++y) {
          for (std::size_t x = 0; x < w; ++x) {
            const real* go = G + (y * w + x) * cout;
            for (std::size_t ky = 0; ky < k; ++ky) {
              const long iy = static_cast<long>(y + ky) - pad;
              if (iy < 0 || iy >= static_cast<long>(h)) continue;
              for (std::size_t kx = 0; kx < k; ++kx) {
                const long ix = static_cast<long>(x + kx) - pad;
                if (ix < 0 || ix >= static_cast<long>(w)) continue;
                const std::size_t src = (static_cast<std::size_t>(iy) * w + static_cast<std::size_t>(ix)) * cin;
                const std::size_t tap = ky * k + kx;
                if (want_k) {
                  const real* px = X + src;
                  real* gk = GK + tap * cin * cout;
                  for (std::size_t ci = 0; ci < cin; ++ci) {
                    const real a = px[ci];
                    real* __restrict row = gk + ci * cout;
                    for (std::size_t co = 0; co < cout; ++co) row[co] += a * go[co];
                  }
                }
                if (want_x) {
                  real* gx = GX + src;
                  const real* kt_tap = kt.data() + tap * cout * cin;
                  detail::axpy_rows(gx, go, kt_tap, cout, cin);
                }
              }
            }
          }
        }
      });
}

}  // namespace vidfield::ops
