#pragma once

// Small CSV helpers shared by the CLI and the tests. Doubles are printed with
// 17 significant digits so every value round-trips bit-exactly.

#include <filesystem>
#include <string>
#include <vector>

namespace bohm::csv {

// Shortest-round-trip-safe decimal form of x ("%.17g").
std::string format_double(double x);

// Parses one CSV line into fields (no quoting; the files written here never
// need it).
std::vector<std::string> split_fields(const std::string& line);

// Whole-file reader returning the header row and the data rows.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
Table read_table(const std::filesystem::path& path);

double parse_double(const std::string& field);
long parse_long(const std::string& field);

}  // namespace bohm::csv
