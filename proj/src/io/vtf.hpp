// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "core/tensor.hpp"

// .vtf tensor blocks: "VTF1", u8 dtype (1 = f32, 2 = f64), u8 rank,
// rank x u64 extents, then the row-major payload. Everything little-endian.
namespace vidfield::io {

inline constexpr std::uint8_t kVtfFloat32 = 1;
inline constexpr std::uint8_t kVtfFloat64 = 2;

// Encodes in the build precision.
std::string encode_vtf(const Tensor& t);

// Decodes one block starting at `bytes`; `consumed` receives its length.
// Accepts either dtype, converting to the build precision.
Tensor decode_vtf(std::string_view bytes, std::size_t* consumed = nullptr);

void save_vtf(const Tensor& t, const std::filesystem::path& path);
Tensor load_vtf(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

void put_u64le(std::string& out, std::uint64_t v);
std::uint64_t get_u64le(std::string_view bytes, std::size_t offset);

}  // namespace vidfield::io
