// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "core/common.hpp"

namespace vidfield {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

// Dense row-major array. A rank-0 tensor (empty shape) holds one scalar.
class Tensor {
 public:
  Tensor() : data_(1, real(0)) {}
  explicit Tensor(Shape shape, real fill = real(0));
  Tensor(Shape shape, std::vector<real> data);

  static Tensor scalar(real v) { return Tensor(Shape{}, std::vector<real>{v}); }
  static Tensor from(std::initializer_list<real> values);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return data_.size(); }
  bool is_scalar() const { return data_.size() == 1 && shape_.empty(); }

  std::span<real> data() { return data_; }
  std::span<const real> data() const { return data_; }
  real* ptr() { return data_.data(); }
  const real* ptr() const { return data_.data(); }

  real& operator[](std::size_t i) { return data_[i]; }
  real operator[](std::size_t i) const { return data_[i]; }

  real& at(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
  real at(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }
  real& at(std::size_t i, std::size_t j, std::size_t k) {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }
  real at(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }
  real& at(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
    return data_[((i * shape_[1] + j) * shape_[2] + k) * shape_[3] + l];
  }
  real at(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
    return data_[((i * shape_[1] + j) * shape_[2] + k) * shape_[3] + l];
  }

  Tensor reshaped(Shape shape) const;
  void fill(real v);
  bool all_finite() const;

  bool operator==(const Tensor& other) const = default;

 private:
  Shape shape_;
  std::vector<real> data_;
};

// Throws ErrorCode::numeric naming `where` if any entry is NaN or infinite.
void check_finite(const Tensor& t, const char* where);

real max_abs_diff(const Tensor& a, const Tensor& b);

}  // namespace vidfield
