// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#include "rep/budget.hpp"

#include <cmath>
#include <cstdlib>

namespace vidfield {

double budget_error(std::size_t params, std::size_t reference) {
  return (static_cast<double>(params) - static_cast<double>(reference)) / static_cast<double>(reference);
}

namespace {

// Tries `candidate(k)` for k in [lo, hi] and keeps the closest count.
struct Search {
  std::size_t reference;
  BudgetMatch best;
  bool any = false;

  void consider(const RepConfig& c) {
    const std::size_t n = param_count(c);
    const double err = budget_error(n, reference);
    if (!any || std::abs(err) < std::abs(best.relative_error)) {
      best = BudgetMatch{c, n, reference, err, std::abs(err) <= kBudgetTolerance};
      any = true;
    }
  }

  void sweep(RepConfig base, std::size_t RepConfig::*field, std::size_t lo, std::size_t hi) {
    for (std::size_t k = lo; k <= hi; ++k) {
      base.*field = k;
      consider(base);
    }
  }
};

}  // namespace

BudgetMatch match_param_budget(const RepConfig& reference, Family target) {
  reference.validate();
  const std::size_t ref = param_count(reference);
  if (target == reference.family) return BudgetMatch{reference, ref, ref, 0.0, true};

  RepConfig base = reference;
  base.family = target;
  Search search{ref, {}, false};

  switch (target) {
    case Family::voxel:
      search.sweep(base, &RepConfig::voxel_resolution, 2, 256);
      if (!search.best.within_tolerance) {
        for (std::size_t cv = 1; cv <= 64; ++cv) {
          RepConfig c = base;
          c.voxel_channels = cv;
          search.sweep(c, &RepConfig::voxel_resolution, 2, 256);
        }
      }
      break;
    case Family::posenc:
      search.sweep(base, &RepConfig::mlp_hidden, 1, 4096);
      break;
    case Family::triplane_flow:
      search.sweep(base, &RepConfig::global_channels, 1, 256);
      if (!search.best.within_tolerance) {
        for (std::size_t n = 2; n <= 256; ++n) {
          RepConfig c = base;
          c.plane_resolution = n;
          search.sweep(c, &RepConfig::global_channels, 1, 256);
        }
      }
      break;
    case Family::triplane:
      search.sweep(base, &RepConfig::plane_channels, 1, 256);
      if (!search.best.within_tolerance) {
        for (std::size_t c = 1; c <= 64; ++c) {
          RepConfig cfg = base;
          cfg.plane_channels = c;
          search.sweep(cfg, &RepConfig::plane_resolution, 2, 512);
        }
      }
      break;
  }
  return search.best;
}

}  // namespace vidfield
