// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#include "io/vtf.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <type_traits>

namespace vidfield::io {

namespace {

constexpr char kMagic[4] = {'V', 'T', 'F', '1'};

template <typename U>
void put_le(std::string& out, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

template <typename U>
U get_le(std::string_view bytes, std::size_t offset) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i)
    v |= static_cast<U>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
  return v;
}

}  // namespace

void put_u64le(std::string& out, std::uint64_t v) { put_le<std::uint64_t>(out, v); }
std::uint64_t get_u64le(std::string_view bytes, std::size_t offset) { return get_le<std::uint64_t>(bytes, offset); }

std::string encode_vtf(const Tensor& t) {
  require(t.rank() <= 255, "vtf: rank too large");
  std::string out(kMagic, 4);
  out.push_back(static_cast<char>(kSinglePrecision ? kVtfFloat32 : kVtfFloat64));
  out.push_back(static_cast<char>(t.rank()));
  for (auto d : t.shape()) put_le<std::uint64_t>(out, d);
  out.reserve(out.size() + t.size() * sizeof(real));
  using Bits = std::conditional_t<sizeof(real) == 4, std::uint32_t, std::uint64_t>;
  for (real v : t.data()) put_le<Bits>(out, std::bit_cast<Bits>(v));
  return out;
}

Tensor decode_vtf(std::string_view bytes, std::size_t* consumed) {
  if (bytes.size() < 6 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    fail(ErrorCode::format, "vtf: bad magic (expected \"VTF1\")");
  const auto dtype = static_cast<std::uint8_t>(bytes[4]);
  const auto rank = static_cast<std::uint8_t>(bytes[5]);
  if (dtype != kVtfFloat32 && dtype != kVtfFloat64)
    fail(ErrorCode::format, "vtf: unknown dtype code " + std::to_string(dtype));
  std::size_t pos = 6;
  if (bytes.size() < pos + 8u * rank) fail(ErrorCode::format, "vtf: truncated header");
  Shape shape;
  std::size_t count = 1;
  for (std::uint8_t i = 0; i < rank; ++i) {
    const std::uint64_t d = get_le<std::uint64_t>(bytes, pos);
    pos += 8;
    if (d == 0 || d > (std::uint64_t{1} << 40)) fail(ErrorCode::format, "vtf: invalid extent");
    shape.push_back(static_cast<std::size_t>(d));
    count *= static_cast<std::size_t>(d);
  }
  const std::size_t width = dtype == kVtfFloat32 ? 4 : 8;
  if (bytes.size() < pos + count * width) fail(ErrorCode::format, "vtf: truncated payload");
  std::vector<real> data(count);
  for (std::size_t i = 0; i < count; ++i, pos += width) {
    if (dtype == kVtfFloat32)
      data[i] = static_cast<real>(std::bit_cast<float>(get_le<std::uint32_t>(bytes, pos)));
    else
      data[i] = static_cast<real>(std::bit_cast<double>(get_le<std::uint64_t>(bytes, pos)));
  }
  if (consumed) *consumed = pos;
  return Tensor(std::move(shape), std::move(data));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::io, "write failed for " + path.string());
}

void save_vtf(const Tensor& t, const std::filesystem::path& path) { write_file(path, encode_vtf(t)); }

Tensor load_vtf(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  std::size_t used = 0;
  Tensor t = decode_vtf(bytes, &used);
  if (used != bytes.size()) fail(ErrorCode::format, "vtf: trailing bytes in " + path.string());
  return t;
}

}  // namespace vidfield::io
