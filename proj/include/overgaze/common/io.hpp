#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace og {

std::string read_text_file(const std::filesystem::path& path);

// Write-temp-then-rename so readers never observe a partial file.
void atomic_write_file(const std::filesystem::path& path, const std::string& content);
void atomic_write_file(const std::filesystem::path& path, const std::vector<uint8_t>& content);

std::vector<uint8_t> read_binary_file(const std::filesystem::path& path);

void ensure_dir(const std::filesystem::path& dir);

// Sorted relative filenames matching a suffix, for deterministic directory walks.
std::vector<std::string> list_files(const std::filesystem::path& dir, const std::string& suffix);

}  // namespace og
