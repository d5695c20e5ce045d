#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace vforge {

/// Throws MissingArtifact when the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes to `<path>.tmp` and renames it over `path`, creating parent
/// directories as needed.
void write_atomic(const std::filesystem::path& path, std::string_view content);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace vforge
