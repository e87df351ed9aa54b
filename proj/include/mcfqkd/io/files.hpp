#pragma once

#include <filesystem>
#include <string_view>

namespace mcfqkd::io {

/// Writes `content` to a sibling temporary file and renames it over `path`.
/// Throws std::runtime_error on I/O failure.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace mcfqkd::io
