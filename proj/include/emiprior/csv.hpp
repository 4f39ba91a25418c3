// csv.hpp - Minimal CSV reading and round-trippable number formatting
//
// This software is licensed under the terms of the Apache Licence Version 2.0
// which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace emiprior::csv {

/// Format a double with 17 significant digits, which round-trips exactly
/// through parse_double().
inline std::string format(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split(std::string_view line, char sep = ',') {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    out.emplace_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double parse_double(std::string_view s, std::size_t row = 0) {
  s = trim(s);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParseError("cannot parse number '" + std::string(s) + "'", row);
  return v;
}

inline long long parse_int(std::string_view s, std::size_t row = 0) {
  s = trim(s);
  long long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParseError("cannot parse integer '" + std::string(s) + "'", row);
  return v;
}

/// A parsed CSV file: the header row and the data rows. Blank lines and
/// lines starting with '#' are skipped; `line_numbers` holds the 1-based
/// file line of every data row for error reporting.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;

  std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw ParseError("missing column '" + std::string(name) + "'", 1);
  }
};

inline Table read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  Table t;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    auto view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    auto fields = split(view);
    if (!have_header) {
      t.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size())
      throw ParseError("expected " + std::to_string(t.header.size()) + " fields, got "
                       + std::to_string(fields.size()) + " in '" + path + "'", lineno);
    t.rows.push_back(std::move(fields));
    t.line_numbers.push_back(lineno);
  }
  if (!have_header) throw ParseError("empty file '" + path + "'");
  return t;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path + "'");
  return out;
}

} // namespace emiprior::csv
