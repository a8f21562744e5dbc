// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#include "io/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>

namespace vidfield::io {

namespace {

using Rgb = std::array<double, 3>;

Rgb random_color(Pcg32& rng, double lo = 0.15, double hi = 0.85) {
  return {rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi)};
}

// Bilinear lookup of a function defined on the integer lattice.
double lattice_bilinear(const std::function<double(long, long)>& f, double x, double y) {
  const double fx = std::floor(x), fy = std::floor(y);
  const double ax = x - fx, ay = y - fy;
  const auto x0 = static_cast<long>(fx), y0 = static_cast<long>(fy);
  double v = (1 - ax) * (1 - ay) * f(x0, y0);
  if (ax != 0) v += ax * (1 - ay) * f(x0 + 1, y0);
  if (ay != 0) v += (1 - ax) * ay * f(x0, y0 + 1);
  if (ax != 0 && ay != 0) v += ax * ay * f(x0 + 1, y0 + 1);
  return v;
}

long wrap(long v, long n) {
  long r = v % n;
  return r < 0 ? r + n : r;
}

// Periodic value noise on an h x w lattice, two octaves, per channel.
std::vector<Rgb> periodic_texture(std::size_t h, std::size_t w, Pcg32& rng) {
  std::vector<Rgb> tex(h * w, Rgb{0, 0, 0});
  const std::size_t cells[2] = {8, 4};
  const double amp[2] = {0.65, 0.35};
  for (int o = 0; o < 2; ++o) {
    const std::size_t gx = std::max<std::size_t>(1, w / cells[o]);
    const std::size_t gy = std::max<std::size_t>(1, h / cells[o]);
    std::vector<Rgb> knots(gx * gy);
    for (auto& k : knots) k = {rng.uniform(), rng.uniform(), rng.uniform()};
    for (std::size_t i = 0; i < h; ++i)
      for (std::size_t j = 0; j < w; ++j) {
        const double u = static_cast<double>(j) * static_cast<double>(gx) / static_cast<double>(w);
        const double v = static_cast<double>(i) * static_cast<double>(gy) / static_cast<double>(h);
        const auto u0 = static_cast<std::size_t>(u), v0 = static_cast<std::size_t>(v);
        // Smoothstep blending between knots.
        double su = u - static_cast<double>(u0), sv = v - static_cast<double>(v0);
        su = su * su * (3 - 2 * su);
        sv = sv * sv * (3 - 2 * sv);
        const std::size_t u1 = (u0 + 1) % gx, v1 = (v0 + 1) % gy;
        for (int c = 0; c < 3; ++c) {
          const double a = knots[v0 * gx + u0][c], b = knots[v0 * gx + u1][c];
          const double d = knots[v1 * gx + u0][c], e = knots[v1 * gx + u1][c];
          const double val = (1 - sv) * ((1 - su) * a + su * b) + sv * ((1 - su) * d + su * e);
          tex[i * w + j][c] += amp[o] * val;
        }
      }
  }
  for (auto& px : tex)
    for (auto& v : px) v = 0.05 + 0.9 * std::clamp(v, 0.0, 1.0);
  return tex;
}

// Fraction of the pixel centered at (x, y) covered by an oriented bar,
// estimated on a 4 x 4 subgrid.
double bar_coverage(double x, double y, double cx, double cy, double angle, double half_len, double half_thick) {
  const double c = std::cos(angle), s = std::sin(angle);
  int hits = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const double px = x + (b + 0.5) / 4.0 - 0.5 - cx;
      const double py = y + (a + 0.5) / 4.0 - 0.5 - cy;
      const double along = px * c + py * s;
      const double across = -px * s + py * c;
      if (std::abs(along) <= half_len && std::abs(across) <= half_thick) ++hits;
    }
  return hits / 16.0;
}

}  // namespace

void to_json(nlohmann::json& j, const SynthParams& p) {
  j = nlohmann::json{{"kind", p.kind},
                     {"frames", p.frames},
                     {"height", p.height},
                     {"width", p.width},
                     {"seed", p.seed},
                     {"velocity_x", p.velocity_x},
                     {"velocity_y", p.velocity_y},
                     {"angular_velocity", p.angular_velocity}};
}

void from_json(const nlohmann::json& j, SynthParams& p) {
  try {
    p.kind = j.value("kind", p.kind);
    p.frames = j.value("frames", p.frames);
    p.height = j.value("height", p.height);
    p.width = j.value("width", p.width);
    p.seed = j.value("seed", p.seed);
    p.velocity_x = j.value("velocity_x", p.velocity_x);
    p.velocity_y = j.value("velocity_y", p.velocity_y);
    p.angular_velocity = j.value("angular_velocity", p.angular_velocity);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::invalid_argument, std::string("synth parameters: ") + e.what());
  }
}

const std::vector<std::string>& synth_kinds() {
  static const std::vector<std::string> kinds = {"constant", "translating_square", "translating_texture",
                                                 "rotating_bar", "two_objects_crossing"};
  return kinds;
}

Video synth_video(const SynthParams& p) {
  const auto& kinds = synth_kinds();
  if (std::find(kinds.begin(), kinds.end(), p.kind) == kinds.end()) {
    std::string allowed;
    for (const auto& k : kinds) allowed += (allowed.empty() ? "" : ", ") + k;
    fail(ErrorCode::invalid_argument, "unknown synthetic video kind '" + p.kind + "' (allowed: " + allowed + ")");
  }
  require(p.frames >= 2, "synthetic video needs at least 2 frames");
  require(p.height >= 2 && p.width >= 2, "synthetic video needs height and width >= 2");
  require(std::isfinite(p.velocity_x) && std::isfinite(p.velocity_y) && std::isfinite(p.angular_velocity),
          "synthetic video velocities must be finite");

  const std::size_t t_n = p.frames, h = p.height, w = p.width;
  Video video{Tensor({t_n, h, w, 3})};
  Pcg32 rng(p.seed, 0xda3e39cb94b95bdbULL);
  auto put = [&](std::size_t k, std::size_t i, std::size_t j, const Rgb& c) {
    for (int ch = 0; ch < 3; ++ch) video.frames.at(k, i, j, ch) = static_cast<real>(c[ch]);
  };
  auto blend = [](const Rgb& bg, const Rgb& fg, double a) {
    return Rgb{bg[0] + a * (fg[0] - bg[0]), bg[1] + a * (fg[1] - bg[1]), bg[2] + a * (fg[2] - bg[2])};
  };
  const long side = std::max<long>(2, static_cast<long>(std::min(h, w) / 4));

  if (p.kind == "constant") {
    const Rgb c = random_color(rng);
    for (std::size_t k = 0; k < t_n; ++k)
      for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < w; ++j) put(k, i, j, c);
  } else if (p.kind == "translating_square") {
    const Rgb bg = random_color(rng, 0.05, 0.35), fg = random_color(rng, 0.65, 0.95);
    const long x0 = static_cast<long>(w) / 4, y0 = static_cast<long>(h) / 4;
    auto inside = [&](long x, long y) { return (x >= x0 && x < x0 + side && y >= y0 && y < y0 + side) ? 1.0 : 0.0; };
    for (std::size_t k = 0; k < t_n; ++k)
      for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < w; ++j) {
          const double cov = lattice_bilinear(inside, static_cast<double>(j) - p.velocity_x * static_cast<double>(k),
                                              static_cast<double>(i) - p.velocity_y * static_cast<double>(k));
          put(k, i, j, blend(bg, fg, cov));
        }
  } else if (p.kind == "translating_texture") {
    const auto tex = periodic_texture(h, w, rng);
    for (std::size_t k = 0; k < t_n; ++k)
      for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < w; ++j) {
          Rgb c{};
          for (int ch = 0; ch < 3; ++ch) {
            auto f = [&](long x, long y) {
              return tex[static_cast<std::size_t>(wrap(y, static_cast<long>(h))) * w +
                         static_cast<std::size_t>(wrap(x, static_cast<long>(w)))][ch];
            };
            c[ch] = lattice_bilinear(f, static_cast<double>(j) - p.velocity_x * static_cast<double>(k),
                                     static_cast<double>(i) - p.velocity_y * static_cast<double>(k));
          }
          put(k, i, j, c);
        }
  } else if (p.kind == "rotating_bar") {
    const Rgb bg = random_color(rng, 0.05, 0.35), fg = random_color(rng, 0.65, 0.95);
    const double angle0 = rng.uniform(0.0, std::numbers::pi);
    const double cx = (static_cast<double>(w) - 1) / 2, cy = (static_cast<double>(h) - 1) / 2;
    const double half_len = 0.4 * static_cast<double>(std::min(h, w));
    const double half_thick = std::max(1.0, static_cast<double>(std::min(h, w)) / 16.0);
    for (std::size_t k = 0; k < t_n; ++k) {
      const double angle = angle0 + p.angular_velocity * static_cast<double>(k);
      for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < w; ++j) {
          const double cov = bar_coverage(static_cast<double>(j), static_cast<double>(i), cx, cy, angle, half_len,
                                          half_thick);
          put(k, i, j, blend(bg, fg, cov));
        }
    }
  } else {  // two_objects_crossing
    const Rgb bg = random_color(rng, 0.05, 0.3), ca = random_color(rng, 0.6, 0.95), cb = random_color(rng, 0.6, 0.95);
    const long ay = static_cast<long>(h) / 3, by = ay + side / 2;
    const long ax = 0, bx = static_cast<long>(w) - side;
    auto square_at = [&](long x0, long y0) {
      return [=](long x, long y) { return (x >= x0 && x < x0 + side && y >= y0 && y < y0 + side) ? 1.0 : 0.0; };
    };
    const auto sa = square_at(ax, ay), sb = square_at(bx, by);
    const double speed = std::max(std::abs(p.velocity_x), 0.25);
    for (std::size_t k = 0; k < t_n; ++k)
      for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < w; ++j) {
          const double dk = static_cast<double>(k);
          const double cov_a = lattice_bilinear(sa, static_cast<double>(j) - speed * dk, static_cast<double>(i));
          const double cov_b = lattice_bilinear(sb, static_cast<double>(j) + speed * dk, static_cast<double>(i));
          // b passes in front of a.
          put(k, i, j, blend(blend(bg, ca, cov_a), cb, cov_b));
        }
  }
  return video;
}

}  // namespace vidfield::io
