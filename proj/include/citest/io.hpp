#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "citest/errors.hpp"
#include "citest/sample.hpp"

namespace citest {

/// Parsed delimited text: header names plus a numeric row-major block.
struct dataset {
  std::vector<std::string> columns;
  matrix values;
};

namespace detail {

inline std::string trim(std::string s) {
  const auto is_space = [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && is_space(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t start = 0;
  while (start < s.size() && is_space(static_cast<unsigned char>(s[start]))) ++start;
  return s.substr(start);
}

inline std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, delim)) out.push_back(field);
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

}  // namespace detail

/// Reads delimited text with a header row. The delimiter is auto-detected
/// from the header line: tab when present, comma otherwise. Parse failures
/// report the 1-based data row and the column name.
inline dataset read_delimited(std::istream& in, const std::string& origin = "<input>") {
  std::string line;
  if (!std::getline(in, line)) throw invalid_input(origin + ": empty input");
  const char delim = line.find('\t') != std::string::npos ? '\t' : ',';

  dataset out;
  for (std::string& name : detail::split(line, delim)) {
    out.columns.push_back(detail::trim(name));
  }
  if (out.columns.empty()) throw invalid_input(origin + ": no columns in header");

  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    const std::vector<std::string> fields = detail::split(line, delim);
    ++rows;
    if (fields.size() != out.columns.size()) {
      throw invalid_input(origin + ": row " + std::to_string(rows) + " has " +
                          std::to_string(fields.size()) + " fields, expected " +
                          std::to_string(out.columns.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const std::string field = detail::trim(fields[c]);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw invalid_input(origin + ": row " + std::to_string(rows) + ", column '" +
                            out.columns[c] + "': not a number: '" + field + "'");
      }
      values.push_back(v);
    }
  }
  if (rows == 0) throw invalid_input(origin + ": no data rows");
  out.values.rows = rows;
  out.values.cols = out.columns.size();
  out.values.data = std::move(values);
  return out;
}

inline dataset read_delimited_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input("cannot open data file: " + path);
  return read_delimited(in, path);
}

inline std::size_t find_column(const dataset& data, const std::string& name) {
  const auto it = std::find(data.columns.begin(), data.columns.end(), name);
  if (it == data.columns.end()) {
    std::string available;
    for (const std::string& c : data.columns) {
      if (!available.empty()) available += ", ";
      available += c;
    }
    throw invalid_input("column '" + name + "' not found (available: " + available + ")");
  }
  return static_cast<std::size_t>(it - data.columns.begin());
}

/// Assembles a sample from named columns. Discrete z infers the support from
/// the distinct observed values.
inline sample build_sample(const dataset& data, const std::string& y_column,
                           const std::string& z_column, const std::vector<std::string>& x_columns,
                           z_kind kind) {
  if (x_columns.empty()) throw invalid_input("need at least one x column");
  const std::size_t yi = find_column(data, y_column);
  const std::size_t zi = find_column(data, z_column);
  std::vector<std::size_t> xi;
  xi.reserve(x_columns.size());
  for (const std::string& name : x_columns) xi.push_back(find_column(data, name));

  const std::size_t n = data.values.rows;
  sample out;
  out.kind = kind;
  out.y.resize(n);
  out.z.resize(n);
  out.x = matrix(n, xi.size());
  for (std::size_t r = 0; r < n; ++r) {
    out.y[r] = data.values(r, yi);
    out.z[r] = data.values(r, zi);
    for (std::size_t c = 0; c < xi.size(); ++c) out.x(r, c) = data.values(r, xi[c]);
  }
  if (kind == z_kind::discrete) {
    const std::set<double> support(out.z.begin(), out.z.end());
    out.z_support.assign(support.begin(), support.end());
  }
  out.validate();
  return out;
}

/// Shortest decimal representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace citest
