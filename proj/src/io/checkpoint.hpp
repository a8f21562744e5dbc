// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "rep/representation.hpp"

// Checkpoint container: u64 little-endian header length, UTF-8 JSON header,
// then one .vtf block per parameter in the order the header lists them.
// Each header entry carries the block's byte length and CRC32.
namespace vidfield::io {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  std::unique_ptr<Representation> representation;
  nlohmann::json fit;  // fit configuration echo, null when absent
};

std::string encode_checkpoint(const Representation& rep, const nlohmann::json& fit_echo = nullptr);
Checkpoint decode_checkpoint(std::string_view bytes);

void save_checkpoint(const Representation& rep, const std::filesystem::path& path,
                     const nlohmann::json& fit_echo = nullptr);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace vidfield::io
