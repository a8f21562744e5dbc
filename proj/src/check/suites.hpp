// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/gradcheck.hpp"

namespace vidfield {

enum class GradScope { primitives, warp, end2end };

std::string to_string(GradScope s);
GradScope grad_scope_from_string(const std::string& s);

struct SuiteOptions {
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  CheckOptions check;
};

// Randomized finite-difference checks; one merged report per op, each op
// listed once. Sampling and warp inputs keep every coordinate at least 0.05
// away from integers, and kinked activations see inputs at least 0.05 away
// from zero.
std::vector<CheckReport> run_gradcheck_suite(GradScope scope, const SuiteOptions& opts = {});

}  // namespace vidfield
