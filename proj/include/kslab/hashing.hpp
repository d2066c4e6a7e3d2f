/**
 * @file hashing.hpp
 * @brief SHA-1 digests in the git object format.
 */
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace kslab {

/// Lowercase hex SHA-1 of `bytes`.
std::string sha1_hex(std::string_view bytes);

/// git blob id: SHA-1 of "blob <size>\0" followed by the content.
std::string git_blob_hash(std::string_view bytes);

/// git_blob_hash of a file's contents. Throws Error when unreadable.
std::string file_blob_hash(const std::string& path);

/// SHA-1 over "path\0hash\n" lines in the given (already sorted) order.
std::string combine_hashes(const std::vector<std::pair<std::string, std::string>>& entries);

}  // namespace kslab
