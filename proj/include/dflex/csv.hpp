#pragma once
// Minimal comma-delimited reader/writer for the flat tables this project uses.
// Fields never contain commas or quotes, so no quoting rules are implemented.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "dflex/error.hpp"

namespace dflex {

struct CsvRow {
  std::vector<std::string> fields;
  std::size_t line_no = 0;  // 1-based, header included
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.emplace_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  if (!out.empty() && !out.back().empty() && out.back().back() == '\r') out.back().pop_back();
  return out;
}

// Streams rows to `sink`; checks the header matches `expected_header` exactly.
inline void read_csv(const std::string& path, const std::vector<std::string>& expected_header,
                     const std::function<void(const CsvRow&)>& sink) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open");
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw DataError(path + ": empty file (missing header)");
  ++line_no;
  if (split_csv_line(line) != expected_header) {
    std::string want;
    for (std::size_t i = 0; i < expected_header.size(); ++i)
      want += (i ? "," : "") + expected_header[i];
    throw DataError(path + ":1: bad header, expected `" + want + "`, got `" + line + "`");
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    CsvRow row{split_csv_line(line), line_no};
    if (row.fields.size() != expected_header.size()) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(expected_header.size()) + " fields, got " +
                      std::to_string(row.fields.size()));
    }
    sink(row);
  }
}

inline long long parse_int_field(const std::string& path, const CsvRow& row, std::size_t col,
                                 const std::string& col_name) {
  const std::string& s = row.fields[col];
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw DataError(path + ":" + std::to_string(row.line_no) + ": column `" + col_name +
                    "`: not an integer: `" + s + "`");
  return v;
}

inline double parse_double_field(const std::string& path, const CsvRow& row, std::size_t col,
                                 const std::string& col_name) {
  const std::string& s = row.fields[col];
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError(path + ":" + std::to_string(row.line_no) + ": column `" + col_name +
                    "`: not a number: `" + s + "`");
  }
}

// 17 significant digits: doubles round-trip exactly through text.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}

}  // namespace dflex
