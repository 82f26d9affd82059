#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "exokit/errors.hpp"

namespace exokit {

/// Shortest decimal representation that parses back to the same double.
/// -0.0 is canonicalized to "0" so equal values always serialize identically.
inline std::string format_double(double v) {
  if (v == 0.0) v = 0.0;
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text, const std::string& context) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw InputError(context + ": cannot parse number '" + std::string(text) + "'");
  }
  return v;
}

struct NumericTable {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;  // one vector per header field

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

/// Reads a numeric CSV with a mandatory header line. Comma separated, one
/// record per line, every field a number. Errors carry 1-based line numbers.
inline NumericTable read_numeric_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string data = ss.str();

  NumericTable table;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  const std::string where = path.filename().string();

  auto next_line = [&](std::string_view& line) -> bool {
    if (pos >= data.size()) return false;
    std::size_t end = data.find('\n', pos);
    if (end == std::string::npos) end = data.size();
    line = std::string_view(data).substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;
    ++line_no;
    return true;
  };

  std::string_view line;
  if (!next_line(line) || line.empty()) {
    throw InputError(where + ": empty file, expected a CSV header");
  }
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    table.names.emplace_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  table.columns.resize(table.names.size());

  while (next_line(line)) {
    if (line.empty()) continue;
    std::size_t field = 0;
    std::size_t at = 0;
    while (true) {
      const std::size_t comma = line.find(',', at);
      const std::string_view cell = line.substr(at, comma - at);
      if (field >= table.names.size()) {
        throw InputError(where + ": line " + std::to_string(line_no) +
                         " has more fields than the header");
      }
      table.columns[field].push_back(
          parse_double(cell, where + ": line " + std::to_string(line_no)));
      ++field;
      if (comma == std::string_view::npos) break;
      at = comma + 1;
    }
    if (field != table.names.size()) {
      throw InputError(where + ": line " + std::to_string(line_no) + " has " +
                       std::to_string(field) + " fields, expected " +
                       std::to_string(table.names.size()));
    }
  }
  return table;
}

/// Writes a numeric CSV (JSON-free, LF endings, round-trip-exact numbers).
inline void write_numeric_csv(const std::filesystem::path& path,
                              std::span<const std::string> names,
                              std::span<const std::vector<double>> columns) {
  if (names.size() != columns.size()) {
    throw InputError("write_numeric_csv: header/column count mismatch");
  }
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& col : columns) {
    if (col.size() != rows) throw InputError("write_numeric_csv: ragged columns");
  }

  std::string buf;
  buf.reserve(rows * names.size() * 12 + 64);
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (j > 0) buf.push_back(',');
    buf.append(names[j]);
  }
  buf.push_back('\n');
  char num[32];
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (j > 0) buf.push_back(',');
      double v = columns[j][i];
      if (v == 0.0) v = 0.0;
      const auto res = std::to_chars(num, num + sizeof(num), v);
      buf.append(num, res.ptr);
    }
    buf.push_back('\n');
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw InputError("short write to '" + path.string() + "'");
}

}  // namespace exokit
