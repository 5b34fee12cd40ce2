#pragma once

#include <filesystem>
#include <string>

namespace toyaudit {

// temp file + rename, so a crash mid-write never leaves a partial output
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

}  // namespace toyaudit
