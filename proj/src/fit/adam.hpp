// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "core/tape.hpp"

namespace vidfield {

struct AdamHyper {
  double lr = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  Tensor m;
  Tensor v;
  std::size_t step = 0;
};

// One bias-corrected Adam update of `param` in place. Throws numeric on a
// non-finite gradient (the parameter is left untouched).
void adam_step(Tensor& param, const Tensor& grad, AdamState& state, const AdamHyper& hyper);

// Adam over every tensor of a ParameterSet, using each Parameter::grad.
class Adam {
 public:
  explicit Adam(AdamHyper hyper) : hyper_(hyper) {}
  void step(ParameterSet& params);
  const AdamHyper& hyper() const { return hyper_; }

 private:
  AdamHyper hyper_;
  std::vector<AdamState> states_;
};

}  // namespace vidfield
