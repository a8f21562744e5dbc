// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "core/tape.hpp"

// Differentiable primitives. Every function records one node on the tape of
// its first argument. Spatial tensors are laid out H x W x C (row = y).
namespace vidfield::ops {

enum class Elementwise { add, sub, mul, div, leaky_relu, sigmoid, tanh, square };

inline constexpr real kLeakySlope = real(0.2);

const char* to_string(Elementwise kind);

// Binary kinds require `b` to have the shape of `a` or to be a single-element
// tensor. Unary kinds ignore `b`.
Var elementwise(Elementwise kind, Var a, Var b);
Var elementwise(Elementwise kind, Var a, real b);
Var elementwise(Elementwise kind, Var a);

inline Var add(Var a, Var b) { return elementwise(Elementwise::add, a, b); }
inline Var sub(Var a, Var b) { return elementwise(Elementwise::sub, a, b); }
inline Var mul(Var a, Var b) { return elementwise(Elementwise::mul, a, b); }
inline Var div(Var a, Var b) { return elementwise(Elementwise::div, a, b); }
inline Var add(Var a, real b) { return elementwise(Elementwise::add, a, b); }
inline Var mul(Var a, real b) { return elementwise(Elementwise::mul, a, b); }
inline Var leaky_relu(Var a) { return elementwise(Elementwise::leaky_relu, a); }
inline Var sigmoid(Var a) { return elementwise(Elementwise::sigmoid, a); }
inline Var tanh(Var a) { return elementwise(Elementwise::tanh, a); }
inline Var square(Var a) { return elementwise(Elementwise::square, a); }

// c - a
Var rsub(real c, Var a);

Var sum(Var a);
Var mean(Var a);

// (M x K) . (K x N)
Var matmul(Var a, Var b);

// Adds a length-C bias along the last axis of `a`.
Var add_bias(Var a, Var bias);

// Zero-padded "same" cross-correlation. input H x W x Cin, kernel
// k x k x Cin x Cout with k in {1, 3}, bias Cout.
Var conv2d(Var input, Var kernel, Var bias);

Var reshape(Var a, Shape shape);
// Concatenates along the last axis; leading extents must agree.
Var concat_last(const std::vector<Var>& parts);
// Columns [begin, end) of the last axis.
Var slice_last(Var a, std::size_t begin, std::size_t end);
// Repeats a trailing extent of 1 `count` times.
Var broadcast_last(Var a, std::size_t count);

// Bilinear lookup in an N x N x C plane (plane[row = py][col = px]) at P
// continuous grid coordinates given as a P x 2 tensor of (px, py). Coordinates
// are clamped to [0, N-1]. Output is P x C. Differentiable with respect to the
// plane and the coordinates.
Var bilinear_sample2d(Var plane, Var coords);

// Trilinear lookup in a D x D x D x C volume indexed (z, y, x) at P x 3
// coordinates (px, py, pz). Output is P x C.
Var trilinear_sample3d(Var volume, Var coords);

// Single-point conveniences returning a length-C tensor.
Var bilinear_sample2d(Var plane, real px, real py);
Var trilinear_sample3d(Var volume, real px, real py, real pz);

// Weighted sum of same-shape tensors with constant weights.
Var weighted_sum(const std::vector<Var>& parts, std::span<const real> weights);

}  // namespace vidfield::ops
