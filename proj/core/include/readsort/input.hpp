#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <string>
#include <vector>

namespace readsort {

/// Opens a file for reading, decoding gzip transparently when the content is
/// gzip-compressed. Plain files pass through unchanged.
std::unique_ptr<std::istream> open_input(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);
void write_file_text(const std::filesystem::path& path, const std::string& text);

}  // namespace readsort
