// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include <doctest.h>

#include "core/common.hpp"
#include "core/tensor.hpp"

namespace vidfield::testing {

inline Tensor random_tensor(Shape shape, Pcg32& rng, double lo = -1, double hi = 1) {
  Tensor t(std::move(shape));
  for (auto& v : t.data()) v = static_cast<real>(rng.uniform(lo, hi));
  return t;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("vidfield_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Tolerance for values that went through `real` arithmetic.
inline constexpr double kRealTol = kSinglePrecision ? 1e-5 : 1e-12;

template <typename Fn>
ErrorCode error_code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a vidfield::Error");
  return ErrorCode::internal;
}

}  // namespace vidfield::testing
