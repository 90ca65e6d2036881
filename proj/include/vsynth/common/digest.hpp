#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace vsynth {

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view data);

/// Lowercase hex SHA-256 of a file's contents. Throws FileNotFound / IoFailure.
std::string sha256_file_hex(const std::filesystem::path& path);

/// First eight bytes of the SHA-256, big-endian.
std::uint64_t digest64(std::string_view data);

}  // namespace vsynth
