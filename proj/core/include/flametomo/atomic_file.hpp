#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace flametomo {

// Writes to `<path>.tmp.<pid>` and renames over `path`, so readers never see
// a partially written artifact.
void write_file_atomic(const std::string& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::string& path, const std::string& text);

std::vector<std::uint8_t> read_file_bytes(const std::string& path);
std::string read_file_text(const std::string& path);

}  // namespace flametomo
