// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

#include "core/common.hpp"

namespace vidfield::detail {

// y[j] += sum_i a[i] * rows[i * n + j], four rows per pass over y.
inline void axpy_rows(real* __restrict y, const real* __restrict a, const real* __restrict rows, std::size_t m,
                      std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) {
    const real a0 = a[i], a1 = a[i + 1], a2 = a[i + 2], a3 = a[i + 3];
    const real* r0 = rows + i * n;
    const real* r1 = r0 + n;
    const real* r2 = r1 + n;
    const real* r3 = r2 + n;
    for (std::size_t j = 0; j < n; ++j) y[j] += a0 * r0[j] + a1 * r1[j] + a2 * r2[j] + a3 * r3[j];
  }
  for (; i < m; ++i) {
    const real ai = a[i];
    const real* r = rows + i * n;
    for (std::size_t j = 0; j < n; ++j) y[j] += ai * r[j];
  }
}

}  // namespace vidfield::detail
