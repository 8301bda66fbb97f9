#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mimic {

/// Shortest decimal that round-trips to the same double ("0.005", "0.995").
std::string format_double(double value);

std::vector<std::string> split_csv_line(std::string_view line);
std::uint64_t parse_unsigned(std::string_view field);
double parse_double(std::string_view field);

/// Writes via a temporary file and rename, so readers never see a partial file.
void write_file_atomically(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

} // namespace mimic
