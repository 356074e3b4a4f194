#pragma once

#include <cstddef>
#include <string>

namespace stvar {

/// Lower-case hex SHA-256 digest.
std::string sha256_hex(const void* data, std::size_t size);
std::string sha256_hex(const std::string& bytes);

/// Digest of a file's contents; throws std::runtime_error if unreadable.
std::string sha256_file(const std::string& path);

}  // namespace stvar
