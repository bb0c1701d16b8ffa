#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace fgis::store::detail {

// Replaces `path` with `contents`: write a sibling temp file, fsync it,
// rename over the target, fsync the directory. Throws Error(IoError).
void write_atomic(const std::filesystem::path& path, std::string_view contents);

std::optional<std::string> read_whole_file(const std::filesystem::path& path);

// Temp files are named "<target>.tmp-<n>"; this recognizes them.
bool is_temp_file(const std::filesystem::path& path);

}  // namespace fgis::store::detail
