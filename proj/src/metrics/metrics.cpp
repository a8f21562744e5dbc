// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#include "metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace vidfield::metrics {

namespace {

constexpr std::size_t kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = (0.01 * 1.0) * (0.01 * 1.0);
constexpr double kC2 = (0.03 * 1.0) * (0.03 * 1.0);

void check_pair(const Tensor& a, const Tensor& b, const char* what) {
  require(a.shape() == b.shape(), std::string(what) + ": frame shapes differ (" + shape_string(a.shape()) + " vs " +
                                      shape_string(b.shape()) + ")");
}

std::vector<double> gaussian_taps(std::size_t size) {
  std::vector<double> taps(size);
  double total = 0;
  for (std::size_t i = 0; i < size; ++i) {
    const double d = static_cast<double>(i) - static_cast<double>(size / 2);
    taps[i] = std::exp(-d * d / (2 * kSigma * kSigma));
    total += taps[i];
  }
  for (auto& t : taps) t /= total;
  return taps;
}

std::vector<double> luminance(const Tensor& f, std::size_t h, std::size_t w) {
  const std::size_t c = f.rank() == 3 ? f.dim(2) : 1;
  std::vector<double> y(h * w);
  for (std::size_t p = 0; p < h * w; ++p) {
    double s = 0;
    for (std::size_t k = 0; k < c; ++k) s += f[p * c + k];
    y[p] = s / static_cast<double>(c);
  }
  return y;
}

// Separable "valid" Gaussian filtering of an h x w image.
std::vector<double> filter_valid(const std::vector<double>& img, std::size_t h, std::size_t w,
                                 const std::vector<double>& taps) {
  const std::size_t n = taps.size(), oh = h - n + 1, ow = w - n + 1;
  std::vector<double> rows(h * ow);
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < ow; ++j) {
      double s = 0;
      for (std::size_t k = 0; k < n; ++k) s += taps[k] * img[i * w + j + k];
      rows[i * ow + j] = s;
    }
  std::vector<double> out(oh * ow);
  for (std::size_t i = 0; i < oh; ++i)
    for (std::size_t j = 0; j < ow; ++j) {
      double s = 0;
      for (std::size_t k = 0; k < n; ++k) s += taps[k] * rows[(i + k) * ow + j];
      out[i * ow + j] = s;
    }
  return out;
}

}  // namespace

double mse(const Tensor& a, const Tensor& b) {
  check_pair(a, b, "mse");
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    s += d * d;
  }
  return s / static_cast<double>(a.size());
}

double psnr(const Tensor& a, const Tensor& b) {
  check_pair(a, b, "psnr");
  const double m = mse(a, b);
  if (m < 1e-12) return kPsnrCap;
  return 10.0 * std::log10(1.0 / m);
}

double ssim(const Tensor& a, const Tensor& b) {
  check_pair(a, b, "ssim");
  require(a.rank() == 2 || a.rank() == 3, "ssim: frames must be H x W or H x W x C");
  const std::size_t h = a.dim(0), w = a.dim(1);
  // Frames narrower than 11 pixels use the largest odd window that fits.
  const std::size_t side = std::min({kWindow, h, w});
  const auto taps = gaussian_taps(side % 2 ? side : side - 1);
  const auto x = luminance(a, h, w);
  const auto y = luminance(b, h, w);
  std::vector<double> xx(h * w), yy(h * w), xy(h * w);
  for (std::size_t p = 0; p < h * w; ++p) {
    xx[p] = x[p] * x[p];
    yy[p] = y[p] * y[p];
    xy[p] = x[p] * y[p];
  }
  const auto mx = filter_valid(x, h, w, taps);
  const auto my = filter_valid(y, h, w, taps);
  const auto sxx = filter_valid(xx, h, w, taps);
  const auto syy = filter_valid(yy, h, w, taps);
  const auto sxy = filter_valid(xy, h, w, taps);

  double total = 0;
  for (std::size_t p = 0; p < mx.size(); ++p) {
    const double vx = sxx[p] - mx[p] * mx[p];
    const double vy = syy[p] - my[p] * my[p];
    const double cov = sxy[p] - mx[p] * my[p];
    const double num = (2 * mx[p] * my[p] + kC1) * (2 * cov + kC2);
    const double den = (mx[p] * mx[p] + my[p] * my[p] + kC1) * (vx + vy + kC2);
    total += num / den;
  }
  return total / static_cast<double>(mx.size());
}

MetricResult evaluate(const Tensor& a, const Tensor& b) { return {psnr(a, b), ssim(a, b)}; }

}  // namespace vidfield::metrics
