#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "sagabb/format.hpp"

namespace sagabb::csv {

// RFC 4180: quote fields holding a comma, quote, CR or LF; double inner quotes.
inline std::string field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string field(double v) { return format_double(v); }
inline std::string field(long long v) { return std::to_string(v); }
inline std::string field(int v) { return std::to_string(v); }
inline std::string field(bool v) { return v ? "true" : "false"; }

// Rows end in CRLF, as the RFC specifies.
inline void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << fields[i];
  }
  out << "\r\n";
}

// Splits one record; handles quoted fields but not records spanning lines.
inline std::vector<std::string> split_row(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

}  // namespace sagabb::csv
