#include "bohmgrid/csvio.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "bohmgrid/errors.hpp"

namespace bohm::csv {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidInputError("cannot open " + path.string());
  }
  Table table;
  std::string line;
  if (!std::getline(in, line)) {
    throw InvalidInputError(path.string() + " is empty");
  }
  table.header = split_fields(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    table.rows.push_back(split_fields(line));
  }
  return table;
}

double parse_double(const std::string& field) {
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end == field.c_str()) {
    throw InvalidInputError("not a number: '" + field + "'");
  }
  return v;
}

long parse_long(const std::string& field) {
  char* end = nullptr;
  const long v = std::strtol(field.c_str(), &end, 10);
  if (end == field.c_str()) {
    throw InvalidInputError("not an integer: '" + field + "'");
  }
  return v;
}

}  // namespace bohm::csv
