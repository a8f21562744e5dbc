// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "core/gradcheck.hpp"
#include "core/ops.hpp"
#include "test_util.hpp"

using namespace vidfield;
using vidfield::testing::error_code_of;
using vidfield::testing::kRealTol;
using vidfield::testing::random_tensor;

namespace {

Tensor values(Shape shape, std::initializer_list<real> v) { return Tensor(std::move(shape), std::vector<real>(v)); }

// Plain nested-loop cross-correlation with zero padding.
Tensor naive_conv(const Tensor& x, const Tensor& k, const Tensor& b) {
  const long h = static_cast<long>(x.dim(0)), w = static_cast<long>(x.dim(1));
  const long cin = static_cast<long>(x.dim(2)), ks = static_cast<long>(k.dim(0)), cout = static_cast<long>(k.dim(3));
  Tensor y({x.dim(0), x.dim(1), k.dim(3)});
  for (long i = 0; i < h; ++i)
    for (long j = 0; j < w; ++j)
      for (long o = 0; o < cout; ++o) {
        double acc = b[static_cast<std::size_t>(o)];
        for (long di = 0; di < ks; ++di)
          for (long dj = 0; dj < ks; ++dj) {
            const long yi = i + di - ks / 2, xj = j + dj - ks / 2;
            if (yi < 0 || yi >= h || xj < 0 || xj >= w) continue;
            for (long c = 0; c < cin; ++c)
              acc += x.at(static_cast<std::size_t>(yi), static_cast<std::size_t>(xj), static_cast<std::size_t>(c)) *
                     k.at(static_cast<std::size_t>(di), static_cast<std::size_t>(dj), static_cast<std::size_t>(c),
                          static_cast<std::size_t>(o));
          }
        y.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j), static_cast<std::size_t>(o)) =
            static_cast<real>(acc);
      }
  return y;
}

}  // namespace

TEST_CASE("tensor shape bookkeeping") {
  Tensor t({2, 3, 4});
  CHECK(t.size() == 24);
  CHECK(t.rank() == 3);
  t.at(1, 2, 3) = 5;
  CHECK(t[23] == 5);
  CHECK(t.reshaped({6, 4}).at(5, 3) == 5);
  CHECK(error_code_of([&] { (void)t.reshaped({5, 5}); }) == ErrorCode::invalid_argument);
  CHECK(error_code_of([] { Tensor({2, 2}, std::vector<real>{1, 2, 3}); }) == ErrorCode::invalid_argument);
  CHECK(shape_string({2, 3}) == "[2x3]");
}

TEST_CASE("non-finite values are an error state") {
  Tensor t = Tensor::from({1, 2});
  t[1] = std::numeric_limits<real>::infinity();
  CHECK_FALSE(t.all_finite());
  CHECK(error_code_of([&] { check_finite(t, "test"); }) == ErrorCode::numeric);

  Tape tape;
  Var a = tape.leaf(Tensor::from({1, 2}));
  Var z = tape.leaf(Tensor::from({0, 1}));
  CHECK(error_code_of([&] { ops::div(a, z); }) == ErrorCode::numeric);
}

TEST_CASE("elementwise forward values") {
  Tape tape;
  Var a = tape.leaf(Tensor::from({1, 2, 3}));
  Var b = tape.leaf(Tensor::from({4, 5, 6}));
  CHECK(ops::add(a, b).value() == Tensor::from({5, 7, 9}));
  CHECK(ops::sub(a, b).value() == Tensor::from({-3, -3, -3}));
  CHECK(ops::mul(a, b).value() == Tensor::from({4, 10, 18}));
  CHECK(ops::square(a).value() == Tensor::from({1, 4, 9}));
  CHECK(ops::sigmoid(tape.leaf(Tensor::from({0}))).value()[0] == real(0.5));
  CHECK(ops::leaky_relu(tape.leaf(Tensor::from({-2}))).value()[0] == doctest::Approx(-0.4));
  CHECK(ops::leaky_relu(tape.leaf(Tensor::from({3}))).value()[0] == real(3));
  CHECK(ops::tanh(tape.leaf(Tensor::from({0.5}))).value()[0] == doctest::Approx(std::tanh(0.5)));
  CHECK(ops::rsub(1, a).value() == Tensor::from({0, -1, -2}));
}

TEST_CASE("broadcasting accepts only equal shapes and single elements") {
  Tape tape;
  Var a = tape.leaf(Tensor({2, 3}, 1));
  CHECK(ops::mul(a, tape.leaf(Tensor::from({2}))).value() == Tensor({2, 3}, 2));
  CHECK(ops::add(a, tape.leaf(Tensor::scalar(1))).value() == Tensor({2, 3}, 2));
  CHECK(error_code_of([&] { ops::add(a, tape.leaf(Tensor({3}))); }) == ErrorCode::invalid_argument);
  CHECK(error_code_of([&] { ops::add(a, tape.leaf(Tensor({3, 2}))); }) == ErrorCode::invalid_argument);
  CHECK(error_code_of([&] { ops::add(a, tape.leaf(Tensor({2, 1}))); }) == ErrorCode::invalid_argument);
}

TEST_CASE("matmul values and gradients") {
  Tape tape;
  Var eye = tape.leaf(values({2, 2}, {1, 0, 0, 1}));
  Var m = tape.leaf(values({2, 2}, {1, 2, 3, 4}));
  CHECK(ops::matmul(eye, m).value() == m.value());
  CHECK(ops::matmul(tape.leaf(values({1, 2}, {1, 2})), tape.leaf(values({2, 1}, {3, 4}))).value()[0] == 11);
  CHECK(error_code_of([&] { ops::matmul(m, tape.leaf(Tensor({3, 2}))); }) == ErrorCode::invalid_argument);

  // d sum(A.B) / dA = ones . B^T, i.e. every row of the gradient is the row sums of B.
  Pcg32 rng(3);
  Tensor A = random_tensor({3, 4}, rng), B = random_tensor({4, 5}, rng);
  Tape t2;
  Var a = t2.leaf(A), b = t2.leaf(B);
  t2.backward(ops::sum(ops::matmul(a, b)));
  Tensor ga = t2.grad(a);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t p = 0; p < 4; ++p) {
      double row = 0;
      for (std::size_t j = 0; j < 5; ++j) row += B.at(p, j);
      CHECK(ga.at(i, p) == doctest::Approx(row).epsilon(kRealTol));
    }
  auto report = finite_diff_check([](Tape&, const std::vector<Var>& in) { return ops::matmul(in[0], in[1]); },
                                  {A, B});
  CHECK(report.passed);
}

TEST_CASE("conv2d matches a direct loop and padding arithmetic") {
  Tape tape;
  // 1x1 identity kernel.
  Pcg32 rng(5);
  Tensor x = random_tensor({4, 3, 2}, rng);
  Var id = tape.leaf(values({1, 1, 2, 2}, {1, 0, 0, 1}));
  CHECK(ops::conv2d(tape.leaf(x), id, tape.leaf(Tensor({2}))).value() == x);

  // All-ones 3x3 kernel on a constant 5x5 image.
  Tensor ones_k({3, 3, 1, 1}, 1);
  Tensor y = ops::conv2d(tape.leaf(Tensor({5, 5, 1}, 1)), tape.leaf(ones_k), tape.leaf(Tensor({1}))).value();
  CHECK(y.at(2, 2, 0) == 9);
  CHECK(y.at(0, 0, 0) == 4);
  CHECK(y.at(0, 2, 0) == 6);

  Tensor xin = random_tensor({5, 4, 3}, rng), k = random_tensor({3, 3, 3, 2}, rng), b = random_tensor({2}, rng);
  Tensor got = ops::conv2d(tape.leaf(xin), tape.leaf(k), tape.leaf(b)).value();
  CHECK(max_abs_diff(got, naive_conv(xin, k, b)) < 1e-5);

  CHECK(error_code_of([&] { ops::conv2d(tape.leaf(xin), tape.leaf(Tensor({3, 3, 2, 2})), tape.leaf(b)); }) ==
        ErrorCode::invalid_argument);
  CHECK(error_code_of([&] { ops::conv2d(tape.leaf(xin), tape.leaf(Tensor({2, 2, 3, 2})), tape.leaf(b)); }) ==
        ErrorCode::invalid_argument);
}

TEST_CASE("conv2d gradients match finite differences") {
  Pcg32 rng(11);
  auto report = finite_diff_check(
      [](Tape&, const std::vector<Var>& in) { return ops::conv2d(in[0], in[1], in[2]); },
      {random_tensor({4, 4, 2}, rng), random_tensor({3, 3, 2, 3}, rng), random_tensor({3}, rng)});
  CHECK(report.passed);
  CHECK(report.max_rel_error <= PrecisionTraits::gradcheck_tolerance);
}

TEST_CASE("bilinear sampling follows the align-corners convention") {
  Tape tape;
  Var plane = tape.leaf(values({2, 2, 1}, {1, 2, 3, 4}));
  CHECK(ops::bilinear_sample2d(plane, 0, 0).value()[0] == 1);
  CHECK(ops::bilinear_sample2d(plane, 1, 0).value()[0] == 2);
  CHECK(ops::bilinear_sample2d(plane, 0, 1).value()[0] == 3);
  CHECK(ops::bilinear_sample2d(plane, 0.5, 0.5).value()[0] == doctest::Approx(2.5));
  CHECK(ops::bilinear_sample2d(plane, 0.5, 0).value()[0] == doctest::Approx(1.5));
  // Clamped outside the grid.
  CHECK(ops::bilinear_sample2d(plane, -3, 7).value()[0] == 3);

  // Integer coordinates reproduce the grid exactly.
  Pcg32 rng(2);
  Tensor p = random_tensor({4, 5, 3}, rng);
  Var pv = tape.leaf(p);
  for (std::size_t y = 0; y < 4; ++y)
    for (std::size_t x = 0; x < 5; ++x) {
      Tensor s = ops::bilinear_sample2d(pv, static_cast<real>(x), static_cast<real>(y)).value();
      for (std::size_t c = 0; c < 3; ++c) CHECK(s[c] == p.at(y, x, c));
    }
  CHECK(error_code_of([&] { ops::bilinear_sample2d(tape.leaf(Tensor({1, 1, 1})), 0, 0); }) ==
        ErrorCode::invalid_argument);
}

TEST_CASE("bilinear gradients at 50 random non-integer points") {
  Pcg32 rng(17);
  const std::size_t n = 6;
  Tensor coords({50, 2});
  for (auto& v : coords.data()) {
    const double cell = rng.below(static_cast<std::uint32_t>(n - 1));
    v = static_cast<real>(cell + rng.uniform(0.05, 0.95));
  }
  auto report = finite_diff_check(
      [](Tape&, const std::vector<Var>& in) { return ops::bilinear_sample2d(in[0], in[1]); },
      {random_tensor({n, n, 2}, rng), coords});
  CHECK(report.passed);
}

TEST_CASE("trilinear sampling") {
  Tape tape;
  Var c = tape.leaf(Tensor({3, 3, 3, 2}, real(0.7)));
  Tensor s = ops::trilinear_sample3d(c, 1.3, 0.2, 1.9).value();
  CHECK(s[0] == doctest::Approx(0.7));
  CHECK(s[1] == doctest::Approx(0.7));

  Tensor corner({2, 2, 2, 1});
  corner[0] = 1;
  CHECK(ops::trilinear_sample3d(tape.leaf(corner), 0.5, 0.5, 0.5).value()[0] == doctest::Approx(0.125));

  // Axis order: volume is indexed (z, y, x) and coordinates are (px, py, pz).
  Tensor ramp({2, 2, 2, 1});
  ramp.at(1, 0, 0, 0) = 1;  // z = 1
  CHECK(ops::trilinear_sample3d(tape.leaf(ramp), 0, 0, 0.25).value()[0] == doctest::Approx(0.25));

  Pcg32 rng(4);
  Tensor coords({20, 3});
  for (auto& v : coords.data()) v = static_cast<real>(rng.below(3) + rng.uniform(0.05, 0.95));
  auto report = finite_diff_check(
      [](Tape&, const std::vector<Var>& in) { return ops::trilinear_sample3d(in[0], in[1]); },
      {random_tensor({4, 4, 4, 2}, rng), coords});
  CHECK(report.passed);
}

TEST_CASE("structural ops") {
  Tape tape;
  Var a = tape.leaf(values({2, 2}, {1, 2, 3, 4}));
  Var b = tape.leaf(values({2, 1}, {5, 6}));
  CHECK(ops::concat_last({a, b}).value() == values({2, 3}, {1, 2, 5, 3, 4, 6}));
  CHECK(ops::slice_last(a, 1, 2).value() == values({2, 1}, {2, 4}));
  CHECK(ops::broadcast_last(b, 2).value() == values({2, 2}, {5, 5, 6, 6}));
  CHECK(ops::add_bias(a, tape.leaf(Tensor::from({10, 20}))).value() == values({2, 2}, {11, 22, 13, 24}));
  CHECK(ops::sum(a).value()[0] == 10);
  CHECK(ops::mean(a).value()[0] == real(2.5));
  const real w[] = {2, -1};
  CHECK(ops::weighted_sum({a, a}, w).value() == a.value());
}

TEST_CASE("finite_diff_check on a quadratic") {
  auto report = finite_diff_check([](Tape&, const std::vector<Var>& in) { return ops::square(in[0]); },
                                  {Tensor::from({1, 2})});
  CHECK(report.passed);
  if constexpr (!kSinglePrecision) CHECK(report.max_rel_error < 1e-6);

  Tape tape;
  Var x = tape.leaf(Tensor::from({1, 2}));
  tape.backward(ops::sum(ops::square(x)));
  CHECK(tape.grad(x) == Tensor::from({2, 4}));
}

TEST_CASE("finite_diff_check detects a corrupted gradient rule") {
  set_gradient_fault("tanh", real(1.5));
  auto report = finite_diff_check([](Tape&, const std::vector<Var>& in) { return ops::tanh(in[0]); },
                                  {Tensor::from({0.3, -0.7})});
  clear_gradient_fault();
  CHECK_FALSE(report.passed);
}

TEST_CASE("non-finite function values are reported") {
  CHECK(error_code_of([] {
          finite_diff_check(
              [](Tape& t, const std::vector<Var>& in) {
                return ops::div(in[0], t.constant(Tensor::from({0})));
              },
              {Tensor::from({1})});
        }) == ErrorCode::numeric);
}

TEST_CASE("backward is repeatable bitwise") {
  Pcg32 rng(8);
  Tensor x = random_tensor({4, 4, 2}, rng), k = random_tensor({3, 3, 2, 2}, rng);
  Tape tape;
  Var xv = tape.leaf(x), kv = tape.leaf(k);
  Var loss = ops::sum(ops::sigmoid(ops::conv2d(xv, kv, tape.leaf(Tensor({2})))));
  tape.backward(loss);
  Tensor g1 = tape.grad(kv);
  tape.backward(loss);
  CHECK(tape.grad(kv) == g1);
}

TEST_CASE("parameter gradients accumulate into the parameter set") {
  ParameterSet params;
  Parameter& w = params.add("w", Tensor::from({1, 2, 3}));
  Tape tape;
  Var v = tape.param(w);
  CHECK(tape.param(w).id() == v.id());
  tape.backward(ops::sum(ops::square(v)));
  params.zero_grad();
  tape.accumulate_grads(params);
  CHECK(w.grad == Tensor::from({2, 4, 6}));
  CHECK(params.total_size() == 3);
  CHECK(error_code_of([&] { params.add("w", Tensor({1})); }) == ErrorCode::invalid_argument);
}

TEST_CASE("Pcg32 reference stream") {
  // Reference output of the PCG32 demo program (seed 42, stream 54).
  Pcg32 rng(42, 54);
  const std::uint32_t expected[] = {0xa15c02b7, 0x7b47f409, 0xba1d3330, 0x83d2f293, 0xbfa4784b, 0xcbed606e};
  for (std::uint32_t e : expected) CHECK(rng.next_u32() == e);
}
