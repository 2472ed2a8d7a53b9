// JSON checkpoint files: layer specs, normalization statistics, metadata and
// base64 little-endian float32 parameter arrays.
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dvlfill/network.hpp"

namespace dvlfill {

inline constexpr std::string_view kCheckpointFormat = "libeamsnet-ckpt-1";

std::string encode_base64(std::span<const std::uint8_t> bytes);
/// Throws CheckpointError on characters outside the standard alphabet or bad padding.
std::vector<std::uint8_t> decode_base64(std::string_view text);

std::string checkpoint_to_json(const nn::ModelCheckpoint& model);
nn::ModelCheckpoint checkpoint_from_json(std::string_view text);

void save_checkpoint(const std::filesystem::path& path, const nn::ModelCheckpoint& model);
nn::ModelCheckpoint load_checkpoint(const std::filesystem::path& path);

/// FNV-1a of the file bytes, as 16 hex digits.
std::string file_hash(const std::filesystem::path& path);

}  // namespace dvlfill
