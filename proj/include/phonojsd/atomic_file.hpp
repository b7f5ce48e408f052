#pragma once

#include <filesystem>
#include <string_view>

namespace phonojsd {

/// Writes `bytes` to a sibling temp file and renames it over `path`.
void write_file_atomically(const std::filesystem::path& path, std::string_view bytes);

}  // namespace phonojsd
