// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#include "core/ops.hpp"

#include <cmath>

#include "core/kernels.hpp"

namespace vidfield::ops {

const char* to_string(Elementwise kind) {
  switch (kind) {
    case Elementwise::add: return "add";
    case Elementwise::sub: return "sub";
    case Elementwise::mul: return "mul";
    case Elementwise::div: return "div";
    case Elementwise::leaky_relu: return "leaky_relu";
    case Elementwise::sigmoid: return "sigmoid";
    case Elementwise::tanh: return "tanh";
    case Elementwise::square: return "square";
  }
  return "?";
}

namespace {

bool is_binary(Elementwise k) {
  return k == Elementwise::add || k == Elementwise::sub || k == Elementwise::mul || k == Elementwise::div;
}

real apply_binary(Elementwise k, real x, real y) {
  switch (k) {
    case Elementwise::add: return x + y;
    case Elementwise::sub: return x - y;
    case Elementwise::mul: return x * y;
    default: return x / y;
  }
}

real sigmoid_of(real x) {
  if (x >= 0) return real(1) / (real(1) + std::exp(-x));
  real e = std::exp(x);
  return e / (real(1) + e);
}

void add_into(Tensor& dst, const Tensor& src) {
  real* d = dst.ptr();
  const real* s = src.ptr();
  for (std::size_t i = 0; i < dst.size(); ++i) d[i] += s[i];
}

}  // namespace

Var elementwise(Elementwise kind, Var a, Var b) {
  if (!is_binary(kind)) return elementwise(kind, a);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  const bool same = av.shape() == bv.shape();
  const bool b_scalar = bv.size() == 1;
  const bool a_scalar = av.size() == 1;
  require(same || a_scalar || b_scalar,
          std::string(to_string(kind)) + ": shapes " + shape_string(av.shape()) + " and " +
              shape_string(bv.shape()) + " are not broadcast-compatible");
  // Output takes the shape of the non-scalar operand.
  const bool swap = !same && a_scalar && !b_scalar;
  const Tensor& big = swap ? bv : av;
  Tensor out(big.shape());
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) {
    real x = (a_scalar && !same) ? av[0] : av[i];
    real y = (b_scalar && !same) ? bv[0] : bv[i];
    out[i] = apply_binary(kind, x, y);
  }
  return a.tape().record(to_string(kind), std::move(out), {a, b},
                         [a, b, kind, same, a_scalar, b_scalar](Tape& tape, const Tensor& g, const Tensor&) {
    const Tensor& av = a.value();
    const Tensor& bv = b.value();
    const std::size_t n = g.size();
    auto xa = [&](std::size_t i) { return (a_scalar && !same) ? av[0] : av[i]; };
    auto yb = [&](std::size_t i) { return (b_scalar && !same) ? bv[0] : bv[i]; };
    if (a.requires_grad()) {
      Tensor& ga = tape.grad_ref(a);
      for (std::size_t i = 0; i < n; ++i) {
        real d = 0;
        switch (kind) {
          case Elementwise::add:
          case Elementwise::sub: d = g[i]; break;
          case Elementwise::mul: d = g[i] * yb(i); break;
          default: d = g[i] / yb(i); break;
        }
        ga[(a_scalar && !same) ? 0 : i] += d;
      }
    }
    if (b.requires_grad()) {
      Tensor& gb = tape.grad_ref(b);
      for (std::size_t i = 0; i < n; ++i) {
        real d = 0;
        switch (kind) {
          case Elementwise::add: d = g[i]; break;
          case Elementwise::sub: d = -g[i]; break;
          case Elementwise::mul: d = g[i] * xa(i); break;
          default: {
            real y = yb(i);
            d = -g[i] * xa(i) / (y * y);
            break;
          }
        }
        gb[(b_scalar && !same) ? 0 : i] += d;
      }
    }
  });
}

Var elementwise(Elementwise kind, Var a, real b) {
  if (!is_binary(kind)) return elementwise(kind, a);
  const Tensor& av = a.value();
  Tensor out(av.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = apply_binary(kind, av[i], b);
  return a.tape().record(to_string(kind), std::move(out), {a}, [a, b, kind](Tape& tape, const Tensor& g, const Tensor&) {
    Tensor& ga = tape.grad_ref(a);
    for (std::size_t i = 0; i < g.size(); ++i) {
      switch (kind) {
        case Elementwise::add:
        case Elementwise::sub: ga[i] += g[i]; break;
        case Elementwise::mul: ga[i] += g[i] * b; break;
        default: ga[i] += g[i] / b; break;
      }
    }
  });
}

Var elementwise(Elementwise kind, Var a) {
  require(!is_binary(kind), std::string(to_string(kind)) + " needs two operands");
  const Tensor& av = a.value();
  Tensor out(av.shape());
  for (std::size_t i = 0; i < out.size(); ++i) {
    real x = av[i];
    switch (kind) {
      case Elementwise::leaky_relu: out[i] = x > 0 ? x : kLeakySlope * x; break;
      case Elementwise::sigmoid: out[i] = sigmoid_of(x); break;
      case Elementwise::tanh: out[i] = std::tanh(x); break;
      default: out[i] = x * x; break;
    }
  }
  return a.tape().record(to_string(kind), std::move(out), {a},
                         [a, kind](Tape& tape, const Tensor& g, const Tensor& y) {
    const Tensor& x = a.value();
    Tensor& ga = tape.grad_ref(a);
    for (std::size_t i = 0; i < g.size(); ++i) {
      real d = 0;
      switch (kind) {
        case Elementwise::leaky_relu: d = x[i] > 0 ? real(1) : kLeakySlope; break;
        case Elementwise::sigmoid: d = y[i] * (real(1) - y[i]); break;
        case Elementwise::tanh: d = real(1) - y[i] * y[i]; break;
        default: d = real(2) * x[i]; break;
      }
      ga[i] += g[i] * d;
    }
  });
}

Var rsub(real c, Var a) {
  const Tensor& av = a.value();
  Tensor out(av.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = c - av[i];
  return a.tape().record("rsub", std::move(out), {a}, [a](Tape& tape, const Tensor& g, const Tensor&) {
    Tensor& ga = tape.grad_ref(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] -= g[i];
  });
}

Var sum(Var a) {
  const Tensor& av = a.value();
  real s = 0;
  for (std::size_t i = 0; i < av.size(); ++i) s += av[i];
  return a.tape().record("sum", Tensor::scalar(s), {a}, [a](Tape& tape, const Tensor& g, const Tensor&) {
    Tensor& ga = tape.grad_ref(a);
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[0];
  });
}

Var mean(Var a) {
  const Tensor& av = a.value();
  real s = 0;
  for (std::size_t i = 0; i < av.size(); ++i) s += av[i];
  const real inv = real(1) / static_cast<real>(av.size());
  return a.tape().record("mean", Tensor::scalar(s * inv), {a}, [a, inv](Tape& tape, const Tensor& g, const Tensor&) {
    Tensor& ga = tape.grad_ref(a);
    const real d = g[0] * inv;
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += d;
  });
}

Var matmul(Var a, Var b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require(av.rank() == 2 && bv.rank() == 2, "matmul: operands must be matrices");
  const std::size_t m = av.dim(0), k = av.dim(1), n = bv.dim(1);
  require(bv.dim(0) == k, "matmul: inner dimensions differ (" + shape_string(av.shape()) + " . " +
                              shape_string(bv.shape()) + ")");
  Tensor out({m, n});
  const real* A = av.ptr();
  const real* B = bv.ptr();
  real* C = out.ptr();
  for (std::size_t i = 0; i < m; ++i) detail::axpy_rows(C + i * n, A + i * k, B, k, n);
  return a.tape().record("matmul", std::move(out), {a, b},
                         [a, b, m, k, n](Tape& tape, const Tensor& g, const Tensor&) {
    const real* A = a.value().ptr();
    const real* B = b.value().ptr();
    const real* G = g.ptr();
    if (a.requires_grad()) {
      // dA = G . B^T, computed against a transposed copy of B.
      std::vector<real> bt(n * k);
      for (std::size_t p = 0; p < k; ++p)
        for (std::size_t j = 0; j < n; ++j) bt[j * k + p] = B[p * n + j];
      real* GA = tape.grad_ref(a).ptr();
      for (std::size_t i = 0; i < m; ++i) detail::axpy_rows(GA + i * k, G + i * n, bt.data(), n, k);
    }
    if (b.requires_grad()) {
      // dB = A^T . G, computed against a transposed copy of A.
      std::vector<real> at(k * m);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) at[p * m + i] = A[i * k + p];
      real* GB = tape.grad_ref(b).ptr();
      for (std::size_t p = 0; p < k; ++p) detail::axpy_rows(GB + p * n, at.data() + p * m, G, m, n);
    }
  });
}

Var add_bias(Var a, Var bias) {
  const Tensor& av = a.value();
  const Tensor& bv = bias.value();
  require(av.rank() >= 1 && bv.rank() == 1 && bv.dim(0) == av.shape().back(),
          "add_bias: bias " + shape_string(bv.shape()) + " does not match last axis of " + shape_string(av.shape()));
  const std::size_t c = bv.size();
  Tensor out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i % c];
  return a.tape().record("add_bias", std::move(out), {a, bias},
                         [a, bias, c](Tape& tape, const Tensor& g, const Tensor&) {
    if (a.requires_grad()) add_into(tape.grad_ref(a), g);
    if (bias.requires_grad()) {
      Tensor& gb = tape.grad_ref(bias);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i % c] += g[i];
    }
  });
}

Var reshape(Var a, Shape shape) {
  Tensor out = a.value().reshaped(std::move(shape));
  return a.tape().record("reshape", std::move(out), {a}, [a](Tape& tape, const Tensor& g, const Tensor&) {
    Tensor& ga = tape.grad_ref(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
  });
}

Var concat_last(const std::vector<Var>& parts) {
  require(!parts.empty(), "concat_last: no inputs");
  Shape lead = parts[0].shape();
  require(!lead.empty(), "concat_last: inputs must have rank >= 1");
  lead.pop_back();
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const auto& p : parts) {
    Shape s = p.shape();
    require(!s.empty(), "concat_last: inputs must have rank >= 1");
    std::size_t w = s.back();
    s.pop_back();
    require(s == lead, "concat_last: leading extents differ");
    widths.push_back(w);
    total += w;
  }
  const std::size_t rows = shape_size(lead);
  Shape out_shape = lead;
  out_shape.push_back(total);
  Tensor out(out_shape);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const real* src = parts[k].value().ptr();
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < widths[k]; ++c) out[r * total + offset + c] = src[r * widths[k] + c];
    offset += widths[k];
  }
  return parts[0].tape().record("concat_last", std::move(out), parts,
                                [parts, widths, rows, total](Tape& tape, const Tensor& g, const Tensor&) {
    std::size_t offset = 0;
    for (std::size_t k = 0; k < parts.size(); ++k) {
      if (parts[k].requires_grad()) {
        Tensor& gp = tape.grad_ref(parts[k]);
        for (std::size_t r = 0; r < rows; ++r)
          for (std::size_t c = 0; c < widths[k]; ++c) gp[r * widths[k] + c] += g[r * total + offset + c];
      }
      offset += widths[k];
    }
  });
}

Var slice_last(Var a, std::size_t begin, std::size_t end) {
  const Tensor& av = a.value();
  require(av.rank() >= 1, "slice_last: rank must be >= 1");
  const std::size_t width = av.shape().back();
  require(begin < end && end <= width, "slice_last: bad column range");
  const std::size_t rows = av.size() / width;
  const std::size_t w = end - begin;
  Shape s = av.shape();
  s.back() = w;
  Tensor out(s);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < w; ++c) out[r * w + c] = av[r * width + begin + c];
  return a.tape().record("slice_last", std::move(out), {a},
                         [a, rows, width, begin, w](Tape& tape, const Tensor& g, const Tensor&) {
    Tensor& ga = tape.grad_ref(a);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < w; ++c) ga[r * width + begin + c] += g[r * w + c];
  });
}

Var broadcast_last(Var a, std::size_t count) {
  const Tensor& av = a.value();
  require(av.rank() >= 1 && av.shape().back() == 1, "broadcast_last: last extent must be 1");
  require(count >= 1, "broadcast_last: count must be >= 1");
  Shape s = av.shape();
  s.back() = count;
  Tensor out(s);
  for (std::size_t r = 0; r < av.size(); ++r)
    for (std::size_t c = 0; c < count; ++c) out[r * count + c] = av[r];
  return a.tape().record("broadcast_last", std::move(out), {a}, [a, count](Tape& tape, const Tensor& g, const Tensor&) {
    Tensor& ga = tape.grad_ref(a);
    for (std::size_t r = 0; r < ga.size(); ++r) {
      real s = 0;
      for (std::size_t c = 0; c < count; ++c) s += g[r * count + c];
      ga[r] += s;
    }
  });
}

Var weighted_sum(const std::vector<Var>& parts, std::span<const real> weights) {
  require(!parts.empty() && parts.size() == weights.size(), "weighted_sum: need one weight per input");
  const Shape& shape = parts[0].shape();
  for (const auto& p : parts) require(p.shape() == shape, "weighted_sum: shape mismatch");
  Tensor out(shape);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Tensor& v = parts[k].value();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += weights[k] * v[i];
  }
  std::vector<real> w(weights.begin(), weights.end());
  return parts[0].tape().record("weighted_sum", std::move(out), parts,
                                [parts, w](Tape& tape, const Tensor& g, const Tensor&) {
    for (std::size_t k = 0; k < parts.size(); ++k) {
      if (!parts[k].requires_grad()) continue;
      Tensor& gp = tape.grad_ref(parts[k]);
      for (std::size_t i = 0; i < g.size(); ++i) gp[i] += w[k] * g[i];
    }
  });
}

}  // namespace vidfield::ops
