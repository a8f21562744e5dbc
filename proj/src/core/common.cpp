// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#include "core/common.hpp"

#include <atomic>
#include <cmath>
#include <numbers>

namespace vidfield {

double Pcg32::normal(double mean, double stddev) {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  double u2 = uniform();
  return mean + stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {
std::atomic<bool> g_deterministic{false};
}

void set_deterministic(bool on) { g_deterministic.store(on); }
bool deterministic() { return g_deterministic.load(); }

}  // namespace vidfield
