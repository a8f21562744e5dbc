// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "core/tensor.hpp"

namespace vidfield::metrics {

inline constexpr double kPsnrCap = 99.0;

struct MetricResult {
  double psnr_db = 0;
  double ssim = 0;
};

double mse(const Tensor& a, const Tensor& b);

// 10 log10(1 / MSE) over all pixels and channels with peak 1; 99 dB when
// MSE < 1e-12.
double psnr(const Tensor& a, const Tensor& b);

// Mean SSIM over valid window positions of the channel-mean luminance, 11x11
// Gaussian window (sigma 1.5), K1 = 0.01, K2 = 0.03, peak 1. Frames are
// H x W x C (or H x W); below 11 pixels the window shrinks to the largest odd
// size that fits.
double ssim(const Tensor& a, const Tensor& b);

MetricResult evaluate(const Tensor& a, const Tensor& b);

}  // namespace vidfield::metrics
