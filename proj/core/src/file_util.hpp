#pragma once

#include <filesystem>
#include <optional>
#include <string>

namespace safeplan::detail {

/// Throws IoError when the file cannot be read.
std::string read_file(const std::filesystem::path& path);
std::optional<std::string> read_file_if_exists(const std::filesystem::path& path);

/// Writes via a sibling temp file and rename, so readers never observe a
/// partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

} // namespace safeplan::detail
