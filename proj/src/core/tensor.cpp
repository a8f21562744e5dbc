// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#include "core/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vidfield {

std::size_t shape_size(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  os << ']';
  return os.str();
}

Tensor::Tensor(Shape shape, real fill) : shape_(std::move(shape)) {
  for (auto d : shape_) require(d > 0, "tensor extents must be positive, got " + shape_string(shape_));
  data_.assign(shape_size(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<real> data) : shape_(std::move(shape)), data_(std::move(data)) {
  for (auto d : shape_) require(d > 0, "tensor extents must be positive, got " + shape_string(shape_));
  require(shape_size(shape_) == data_.size(),
          "tensor data length " + std::to_string(data_.size()) + " does not match shape " + shape_string(shape_));
}

Tensor Tensor::from(std::initializer_list<real> values) {
  return Tensor(Shape{values.size()}, std::vector<real>(values));
}

Tensor Tensor::reshaped(Shape shape) const {
  require(shape_size(shape) == size(),
          "cannot reshape " + shape_string(shape_) + " to " + shape_string(shape));
  return Tensor(std::move(shape), data_);
}

void Tensor::fill(real v) { std::fill(data_.begin(), data_.end(), v); }

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](real v) { return std::isfinite(v); });
}

void check_finite(const Tensor& t, const char* where) {
  if (!t.all_finite()) fail(ErrorCode::numeric, std::string("non-finite value produced by ") + where);
}

real max_abs_diff(const Tensor& a, const Tensor& b) {
  require(a.shape() == b.shape(), "max_abs_diff: shape mismatch");
  real m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace vidfield
