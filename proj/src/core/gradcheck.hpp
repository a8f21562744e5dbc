// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "core/tape.hpp"

namespace vidfield {

// Outcome of comparing tape gradients against finite differences. The
// per-entry error is |analytic - numeric| / max(1, |analytic|, |numeric|),
// i.e. relative for gradients of magnitude above one and absolute below.
//
// Each entry is evaluated at x +- h and x +- 2h. The numeric gradient is the
// fourth-order central difference. The forward and backward second-order
// one-sided differences must agree within the tolerance, otherwise the
// function is not smooth across the stencil (an activation kink or a
// sampling-cell boundary inside it) and the entry is counted in `skipped`
// instead of being compared. A check with more than 5% skipped entries fails.
struct CheckReport {
  std::string name;
  std::size_t trials = 0;
  std::size_t entries = 0;
  std::size_t skipped = 0;
  double max_rel_error = 0;
  double tolerance = 0;
  bool passed = true;

  void merge(const CheckReport& other);
};

struct CheckOptions {
  real epsilon = PrecisionTraits::fd_epsilon;
  double tolerance = PrecisionTraits::gradcheck_tolerance;
  // Upper bound on entries probed per input (0 = all); picked with `seed`.
  std::size_t max_entries = 0;
  std::uint64_t seed = 0;
};

// Builds the function under test on a fresh tape from leaf inputs. Outputs
// with more than one element are reduced to sum(w * out) with fixed random
// weights w in [0.5, 1.5]; the numeric side accumulates that sum in double.
using LeafFn = std::function<Var(Tape&, const std::vector<Var>& inputs)>;

CheckReport finite_diff_check(const LeafFn& fn, std::vector<Tensor> inputs, const CheckOptions& opts = {});

// Same check against the trainable tensors of a parameter set; `fn` reads
// them through Tape::param.
using ParamFn = std::function<Var(Tape&)>;

CheckReport finite_diff_check(const ParamFn& fn, ParameterSet& params, const CheckOptions& opts = {});

}  // namespace vidfield
