// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#include "rep/posenc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "core/ops.hpp"
#include "rep/decoder.hpp"

namespace vidfield {

Tensor positional_encoding(real x, real y, real t, std::size_t num_frequencies) {
  require(num_frequencies >= 1, "positional_encoding: need at least one frequency");
  Tensor out({6 * num_frequencies + 3});
  const real u[3] = {x, y, t};
  for (int a = 0; a < 3; ++a) out[a] = u[a];
  std::size_t k = 3;
  for (int a = 0; a < 3; ++a) {
    double freq = std::numbers::pi;
    for (std::size_t l = 0; l < num_frequencies; ++l, freq *= 2) {
      out[k++] = static_cast<real>(std::sin(freq * u[a]));
      out[k++] = static_cast<real>(std::cos(freq * u[a]));
    }
  }
  return out;
}

PosEncMlpRep::PosEncMlpRep(RepConfig config) : Representation(std::move(config)) {
  Pcg32 rng(config_.seed);
  std::size_t in = encoding_width();
  for (std::size_t l = 0; l < config_.mlp_depth; ++l) {
    const std::size_t out = config_.mlp_hidden;
    params_.add("mlp." + std::to_string(l) + ".weight",
                normal_tensor({in, out}, std::sqrt(2.0 / static_cast<double>(in)), rng));
    params_.add("mlp." + std::to_string(l) + ".bias", Tensor({out}));
    in = out;
  }
  params_.add("mlp.out.weight", normal_tensor({in, 3}, std::sqrt(2.0 / static_cast<double>(in)), rng));
  params_.add("mlp.out.bias", Tensor({3}));
}

std::vector<Var> PosEncMlpRep::render(Tape& tape, std::span<const real> times) const {
  const std::size_t h = config_.height, w = config_.width, width = encoding_width();
  std::vector<Var> frames;
  for (real t : times) {
    t = std::clamp(t, real(0), real(1));
    Tensor enc({h * w, width});
    for (std::size_t i = 0; i < h; ++i)
      for (std::size_t j = 0; j < w; ++j) {
        const real x = static_cast<real>(j) / static_cast<real>(w - 1);
        const real y = static_cast<real>(i) / static_cast<real>(h - 1);
        Tensor e = positional_encoding(x, y, t, config_.num_frequencies);
        std::copy(e.ptr(), e.ptr() + width, enc.ptr() + (i * w + j) * width);
      }
    Var act = tape.constant(std::move(enc));
    for (std::size_t l = 0; l < config_.mlp_depth; ++l) {
      const std::string base = "mlp." + std::to_string(l);
      act = ops::add_bias(ops::matmul(act, tape.param(params_.get(base + ".weight"))),
                          tape.param(params_.get(base + ".bias")));
      act = ops::leaky_relu(act);
    }
    act = ops::add_bias(ops::matmul(act, tape.param(params_.get("mlp.out.weight"))),
                        tape.param(params_.get("mlp.out.bias")));
    frames.push_back(ops::reshape(ops::sigmoid(act), {h, w, 3}));
  }
  return frames;
}

}  // namespace vidfield
