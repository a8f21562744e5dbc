// Copyright 2026 The vidfield Authors
// SPDX-License-Identifier: Apache-2.0
#include "io/checkpoint.hpp"

#include <zlib.h>

#include "io/vtf.hpp"

namespace vidfield::io {

namespace {

std::uint32_t crc32_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

std::string encode_checkpoint(const Representation& rep, const nlohmann::json& fit_echo) {
  nlohmann::json header;
  header["format"] = "vidfield-checkpoint";
  header["format_version"] = kCheckpointVersion;
  header["representation"] = rep.config();
  header["fit"] = fit_echo;
  std::string payload;
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& p : rep.parameters().all()) {
    const std::string block = encode_vtf(p.value);
    entries.push_back({{"name", p.name}, {"shape", p.value.shape()}, {"bytes", block.size()},
                       {"crc32", crc32_of(block)}});
    payload += block;
  }
  header["tensors"] = entries;
  const std::string text = header.dump(2);
  std::string out;
  put_u64le(out, text.size());
  out += text;
  out += payload;
  return out;
}

namespace {

Checkpoint decode_checked(std::string_view bytes) {
  if (bytes.size() < 8) fail(ErrorCode::format, "checkpoint: truncated header length");
  const std::uint64_t header_len = get_u64le(bytes, 0);
  if (header_len > bytes.size() - 8) fail(ErrorCode::format, "checkpoint: truncated header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(8, header_len));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::format, std::string("checkpoint: malformed header: ") + e.what());
  }
  if (!header.is_object() || header.value("format", "") != "vidfield-checkpoint")
    fail(ErrorCode::format, "checkpoint: not a vidfield checkpoint");
  const int version = header.value("format_version", -1);
  if (version != kCheckpointVersion)
    fail(ErrorCode::version, "checkpoint: unsupported format_version " + std::to_string(version) + " (expected " +
                                 std::to_string(kCheckpointVersion) + ")");

  Checkpoint ck;
  ck.representation = make_representation(header.at("representation").get<RepConfig>());
  ck.fit = header.value("fit", nlohmann::json(nullptr));
  ParameterSet& params = ck.representation->parameters();

  std::size_t pos = 8 + static_cast<std::size_t>(header_len);
  std::size_t loaded = 0;
  for (const auto& entry : header.at("tensors")) {
    const std::string name = entry.at("name").get<std::string>();
    const std::size_t len = entry.at("bytes").get<std::size_t>();
    if (len > bytes.size() - pos) fail(ErrorCode::format, "checkpoint: truncated payload at tensor '" + name + "'");
    const std::string_view block = bytes.substr(pos, len);
    if (crc32_of(block) != entry.at("crc32").get<std::uint32_t>())
      fail(ErrorCode::checksum, "checkpoint: CRC32 mismatch in tensor '" + name + "'");
    std::size_t used = 0;
    Tensor t = decode_vtf(block, &used);
    if (used != len) fail(ErrorCode::format, "checkpoint: block length mismatch in tensor '" + name + "'");
    if (!params.contains(name)) fail(ErrorCode::format, "checkpoint: unexpected tensor '" + name + "'");
    Parameter& p = params.get(name);
    if (t.shape() != p.value.shape())
      fail(ErrorCode::format, "checkpoint: tensor '" + name + "' has shape " + shape_string(t.shape()) +
                                  ", expected " + shape_string(p.value.shape()));
    p.value = std::move(t);
    pos += len;
    ++loaded;
  }
  if (loaded != params.all().size()) fail(ErrorCode::format, "checkpoint: missing parameter tensors");
  if (pos != bytes.size()) fail(ErrorCode::format, "checkpoint: trailing bytes after payload");
  return ck;
}

}  // namespace

Checkpoint decode_checkpoint(std::string_view bytes) {
  try {
    return decode_checked(bytes);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::format, std::string("checkpoint: malformed header: ") + e.what());
  }
}

void save_checkpoint(const Representation& rep, const std::filesystem::path& path, const nlohmann::json& fit_echo) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  write_file(path, encode_checkpoint(rep, fit_echo));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(read_file(path)); }

}  // namespace vidfield::io
