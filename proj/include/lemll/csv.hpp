#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace lemll::csv {

// A parsed comma-separated table: header row plus raw string cells.
// Line numbers are 1-based file lines so errors can point at the source.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
};

// Reads a headered CSV. Blank trailing lines are ignored, cells are trimmed.
// Throws DataError on a missing file or ragged rows.
Table read(const std::filesystem::path& path);

// Parses a decimal cell; throws DataError naming file, line and column.
double parse_number(const std::string& cell, const std::filesystem::path& path,
                    std::size_t line, std::size_t column);

// 17 significant digits, reads back to the identical double.
std::string format_number(double value);

void write(const std::filesystem::path& path,
           const std::vector<std::string>& header,
           const std::vector<std::vector<std::string>>& rows);

}  // namespace lemll::csv
