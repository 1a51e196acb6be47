#pragma once

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "consensus/error.hpp"
#include "consensus/matrix.hpp"

namespace consensus::io {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline bool parse_plain(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace detail

/// Parses a decimal number or a rational "a/b"; the rational is the correctly rounded
/// quotient of the two parsed numbers.
inline double parse_number(std::string_view text) {
  const std::string_view s = detail::trim(text);
  double value = 0.0;
  const auto slash = s.find('/');
  if (slash == std::string_view::npos) {
    if (!detail::parse_plain(s, value)) throw parse_error("not a number: '" + std::string(s) + "'");
    return value;
  }
  double num = 0.0;
  double den = 0.0;
  if (!detail::parse_plain(detail::trim(s.substr(0, slash)), num) ||
      !detail::parse_plain(detail::trim(s.substr(slash + 1)), den)) {
    throw parse_error("not a rational: '" + std::string(s) + "'");
  }
  if (den == 0.0) throw parse_error("zero denominator in '" + std::string(s) + "'");
  return num / den;
}

/// One row per line, comma separated. Blank lines and lines starting with '#' are skipped.
inline Matrix parse_csv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = detail::trim(text.substr(start, end - start));
    ++line_no;
    start = end + 1;
    if (line.empty() || line.front() == '#') continue;
    std::vector<double> row;
    std::size_t pos = 0;
    std::size_t col = 0;
    while (true) {
      const auto comma = line.find(',', pos);
      const auto cell = line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
      try {
        row.push_back(parse_number(cell));
      } catch (const parse_error& e) {
        throw parse_error("row " + std::to_string(rows.size()) + " (line " + std::to_string(line_no) + "), column " +
                          std::to_string(col) + ": " + e.what());
      }
      ++col;
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw parse_error("row " + std::to_string(rows.size()) + " (line " + std::to_string(line_no) + ") has " +
                        std::to_string(row.size()) + " entries, expected " + std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw parse_error("no matrix rows found");
  try {
    return Matrix::from_rows(rows);
  } catch (const validation_error& e) {
    throw parse_error(e.what());
  }
}

/// {"rows": [[...], ...]} with numbers or rational strings such as "1/3".
inline Matrix parse_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw parse_error(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("rows") || !doc["rows"].is_array()) {
    throw parse_error("JSON matrix must be an object with a \"rows\" array");
  }
  std::vector<std::vector<double>> rows;
  const auto& arr = doc["rows"];
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_array()) throw parse_error("row " + std::to_string(i) + " is not an array");
    std::vector<double> row;
    for (std::size_t j = 0; j < arr[i].size(); ++j) {
      const auto& cell = arr[i][j];
      if (cell.is_number()) {
        row.push_back(cell.get<double>());
      } else if (cell.is_string()) {
        try {
          row.push_back(parse_number(cell.get<std::string>()));
        } catch (const parse_error& e) {
          throw parse_error("row " + std::to_string(i) + ", column " + std::to_string(j) + ": " + e.what());
        }
      } else {
        throw parse_error("row " + std::to_string(i) + ", column " + std::to_string(j) + ": not a number");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw parse_error("row " + std::to_string(i) + " has " + std::to_string(row.size()) + " entries, expected " +
                        std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw parse_error("no matrix rows found");
  try {
    return Matrix::from_rows(rows);
  } catch (const validation_error& e) {
    throw parse_error(e.what());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parse_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Dispatches on extension: ".json" is JSON, anything else CSV.
inline Matrix load_matrix(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return path.extension() == ".json" ? parse_json(text) : parse_csv(text);
  } catch (const parse_error& e) {
    throw parse_error(path.string() + ": " + e.what());
  }
}

/// Shortest text that parses back to the same double.
inline std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline std::string to_csv(const Matrix& m) {
  std::string out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_number(m(i, j));
    }
    out += '\n';
  }
  return out;
}

inline nlohmann::json to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return {{"rows", rows}};
}

inline void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error("cannot write " + path.string());
  out << text;
}

}  // namespace consensus::io
