// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace vidfield {

#ifdef VIDFIELD_SINGLE_PRECISION
using real = float;
inline constexpr const char* kPrecisionName = "f32";
#else
using real = double;
inline constexpr const char* kPrecisionName = "f64";
#endif

inline constexpr bool kSinglePrecision = sizeof(real) == 4;

// Tolerances keyed by the build precision.
struct PrecisionTraits {
  // Finite-difference step; powers of two keep x +- h exact for |x| < 1.
  static constexpr real fd_epsilon = kSinglePrecision ? real(0x1p-8) : real(0x1p-20);
  static constexpr double gradcheck_tolerance = kSinglePrecision ? 1e-3 : 1e-5;
};

// Numeric values double as the C API status codes and the CLI exit codes
// where the two overlap (io=1, usage=2, divergence=3, gradcheck=4).
enum class ErrorCode : int {
  io = 1,
  invalid_argument = 2,
  divergence = 3,
  gradcheck = 4,
  format = 5,
  checksum = 6,
  version = 7,
  numeric = 8,
  internal = 9,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorCode::invalid_argument, what);
}

// PCG32 (XSH-RR variant, 64-bit state). Chosen over <random> engines so that
// synthetic data and initializations are reproducible across standard
// library implementations.
class Pcg32 {
 public:
  explicit Pcg32(std::uint64_t seed, std::uint64_t stream = 0x14057b7ef767814fULL) {
    inc_ = (stream << 1u) | 1u;
    state_ = 0;
    next_u32();
    state_ += seed;
    next_u32();
  }

  std::uint32_t next_u32() {
    std::uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    auto rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    std::uint64_t hi = next_u32() >> 5;  // 27 bits
    std::uint64_t lo = next_u32() >> 6;  // 26 bits
    return static_cast<double>((hi << 26) | lo) * (1.0 / 9007199254740992.0);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, bound).
  std::uint32_t below(std::uint32_t bound) {
    std::uint32_t threshold = (0u - bound) % bound;
    for (;;) {
      std::uint32_t r = next_u32();
      if (r >= threshold) return r % bound;
    }
  }

  // Box-Muller; one of the pair is discarded to keep the stream stateless.
  double normal(double mean = 0.0, double stddev = 1.0);

 private:
  std::uint64_t state_;
  std::uint64_t inc_;
};

// Global execution mode. Kernels are sequential in this build, so the flag
// only gates the optional parallel family fits of a comparison run.
void set_deterministic(bool on);
bool deterministic();

}  // namespace vidfield
