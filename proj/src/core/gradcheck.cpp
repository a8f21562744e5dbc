// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#include "core/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/ops.hpp"

namespace vidfield {

void CheckReport::merge(const CheckReport& other) {
  trials += other.trials;
  entries += other.entries;
  skipped += other.skipped;
  max_rel_error = std::max(max_rel_error, other.max_rel_error);
  tolerance = std::max(tolerance, other.tolerance);
  passed = passed && other.passed;
}

namespace {

constexpr std::size_t kMaxSkippedPercent = 5;

// Random projection weights for a non-scalar output.
class Projection {
 public:
  explicit Projection(std::uint64_t seed) : seed_(seed) {}

  Var on_tape(Var out) {
    if (out.size() == 1) return out;
    Tape& tape = out.tape();
    return ops::sum(ops::mul(out, tape.constant(weights(out.shape()))));
  }

  double value(Var out) {
    const Tensor& y = out.value();
    double total = 0;
    if (y.size() == 1) {
      total = static_cast<double>(y[0]);
    } else {
      const Tensor& w = weights(y.shape());
      for (std::size_t i = 0; i < y.size(); ++i) total += static_cast<double>(w[i]) * static_cast<double>(y[i]);
    }
    if (!std::isfinite(total)) fail(ErrorCode::numeric, "finite_diff_check: function value is not finite");
    return total;
  }

 private:
  const Tensor& weights(const Shape& shape) {
    if (w_.shape() != shape) {
      Pcg32 rng(seed_, 0xda3e39cb94b95bdbULL);
      w_ = Tensor(shape);
      for (auto& v : w_.data()) v = static_cast<real>(rng.uniform(0.5, 1.5));
    }
    return w_;
  }

  std::uint64_t seed_;
  Tensor w_ = Tensor::scalar(0);
};

std::vector<std::size_t> probe_indices(std::size_t n, const CheckOptions& opts, Pcg32& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (opts.max_entries == 0 || opts.max_entries >= n) return idx;
  for (std::size_t i = 0; i < opts.max_entries; ++i) {
    std::size_t j = i + rng.below(static_cast<std::uint32_t>(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(opts.max_entries);
  std::sort(idx.begin(), idx.end());
  return idx;
}

double entry_error(double analytic, double numeric) {
  double denom = std::max({1.0, std::abs(analytic), std::abs(numeric)});
  return std::abs(analytic - numeric) / denom;
}

// Finite-difference estimates for one entry; `slot` is restored afterwards.
template <typename Eval>
void check_entry(real& slot, double analytic, double f0, const CheckOptions& opts, Eval&& eval, CheckReport& report) {
  const real saved = slot;
  const double h = static_cast<double>(opts.epsilon);
  auto at = [&](int k) {
    slot = static_cast<real>(static_cast<double>(saved) + k * h);
    return eval();
  };
  const double fp1 = at(1), fp2 = at(2), fm1 = at(-1), fm2 = at(-2);
  slot = saved;

  ++report.entries;
  const double forward = (-3 * f0 + 4 * fp1 - fp2) / (2 * h);
  const double backward = (3 * f0 - 4 * fm1 + fm2) / (2 * h);
  if (entry_error(forward, backward) > opts.tolerance) {
    ++report.skipped;
    return;
  }
  const double central = (8 * (fp1 - fm1) - (fp2 - fm2)) / (12 * h);
  report.max_rel_error = std::max(report.max_rel_error, entry_error(analytic, central));
}

void finish(CheckReport& report) {
  report.passed = report.max_rel_error <= report.tolerance && report.skipped * 100 <= kMaxSkippedPercent * report.entries;
}

}  // namespace

CheckReport finite_diff_check(const LeafFn& fn, std::vector<Tensor> inputs, const CheckOptions& opts) {
  CheckReport report;
  report.trials = 1;
  report.tolerance = opts.tolerance;
  Projection proj(opts.seed);

  std::vector<Tensor> analytic;
  {
    Tape tape;
    std::vector<Var> leaves;
    for (const auto& t : inputs) leaves.push_back(tape.leaf(t));
    Var out = fn(tape, leaves);
    proj.value(out);
    tape.backward(proj.on_tape(out));
    for (const auto& l : leaves) analytic.push_back(tape.grad(l));
  }

  auto eval = [&]() {
    Tape tape;
    std::vector<Var> leaves;
    for (const auto& t : inputs) leaves.push_back(tape.constant(t));
    return proj.value(fn(tape, leaves));
  };

  const double f0 = eval();
  Pcg32 rng(opts.seed, 0x9e3779b97f4a7c15ULL);
  for (std::size_t k = 0; k < inputs.size(); ++k)
    for (std::size_t i : probe_indices(inputs[k].size(), opts, rng))
      check_entry(inputs[k][i], analytic[k][i], f0, opts, eval, report);
  finish(report);
  return report;
}

CheckReport finite_diff_check(const ParamFn& fn, ParameterSet& params, const CheckOptions& opts) {
  CheckReport report;
  report.trials = 1;
  report.tolerance = opts.tolerance;
  Projection proj(opts.seed);

  params.zero_grad();
  {
    Tape tape;
    Var out = fn(tape);
    proj.value(out);
    tape.backward(proj.on_tape(out));
    tape.accumulate_grads(params);
  }
  std::vector<Tensor> analytic;
  for (const auto& p : params.all()) analytic.push_back(p.grad);

  auto eval = [&]() {
    Tape tape;
    return proj.value(fn(tape));
  };

  const double f0 = eval();
  Pcg32 rng(opts.seed, 0x9e3779b97f4a7c15ULL);
  std::size_t k = 0;
  for (auto& p : params.all()) {
    for (std::size_t i : probe_indices(p.value.size(), opts, rng))
      check_entry(p.value[i], analytic[k][i], f0, opts, eval, report);
    ++k;
  }
  params.zero_grad();
  finish(report);
  return report;
}

}  // namespace vidfield
