#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace goci {

/// Whole-file read; throws std::runtime_error naming the path on failure.
std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, std::string_view bytes);

/// FNV-1a 64, hex encoded.
std::string digest(std::string_view bytes);

}  // namespace goci
