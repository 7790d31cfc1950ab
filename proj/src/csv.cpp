#include "netequil/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <iterator>
#include <ostream>

#include "netequil/error.hpp"

namespace netequil {

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::string::npos;
}

CsvTable read_csv(std::istream& in) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  std::vector<std::vector<std::string>> records;
  std::vector<std::size_t> starts;

  std::size_t line = 1;
  std::size_t pos = 0;
  const std::size_t n = text.size();
  while (pos < n) {
    // Skip blank lines.
    if (text[pos] == '\n') {
      ++line;
      ++pos;
      continue;
    }
    if (text[pos] == '\r' && pos + 1 < n && text[pos + 1] == '\n') {
      line += 1;
      pos += 2;
      continue;
    }
    const std::size_t start_line = line;
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    bool done = false;
    while (!done) {
      if (pos == n) {
        if (quoted) {
          throw Error(ErrorKind::ParseError,
                      "line " + std::to_string(start_line) + ": unterminated quoted field");
        }
        fields.push_back(std::move(field));
        break;
      }
      const char c = text[pos++];
      if (quoted) {
        if (c == '"') {
          if (pos < n && text[pos] == '"') {
            field.push_back('"');
            ++pos;
          } else {
            quoted = false;
          }
        } else {
          if (c == '\n') ++line;
          field.push_back(c);
        }
        continue;
      }
      switch (c) {
        case '"':
          quoted = true;
          break;
        case ',':
          fields.push_back(std::move(field));
          field.clear();
          break;
        case '\r':
          if (pos < n && text[pos] == '\n') break;
          field.push_back(c);
          break;
        case '\n':
          ++line;
          fields.push_back(std::move(field));
          done = true;
          break;
        default:
          field.push_back(c);
      }
    }
    records.push_back(std::move(fields));
    starts.push_back(start_line);
  }

  CsvTable table;
  if (records.empty()) return table;
  table.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size()) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(starts[r]) + ": expected " +
                                             std::to_string(table.header.size()) + " fields, got " +
                                             std::to_string(records[r].size()));
    }
    table.rows.push_back(std::move(records[r]));
    table.line.push_back(starts[r]);
  }
  return table;
}

void write_csv_row(std::ostream& out, std::span<const std::string> fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\r\n") == std::string::npos) {
      out << f;
      continue;
    }
    out << '"';
    for (char c : f) {
      if (c == '"') out << '"';
      out << c;
    }
    out << '"';
  }
  out << '\n';
}

std::string format_number(double x) {
  if (x == 0.0) return "0";  // folds -0
  std::array<char, 64> buf{};
  const int len = std::snprintf(buf.data(), buf.size(), "%.12g", x);
  return std::string(buf.data(), static_cast<std::size_t>(len));
}

std::string format_exact(double x) {
  if (x == 0.0) return "0";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

double parse_number(std::string_view text, std::size_t line, std::string_view column) {
  auto fail = [&](const char* why) {
    return Error(ErrorKind::ParseError, "line " + std::to_string(line) + ", column " +
                                            std::string(column) + ": " + why + " '" +
                                            std::string(text) + "'");
  };
  std::string_view t = text;
  while (!t.empty() && (t.front() == ' ' || t.front() == '\t')) t.remove_prefix(1);
  while (!t.empty() && (t.back() == ' ' || t.back() == '\t')) t.remove_suffix(1);
  if (!t.empty() && t.front() == '+') t.remove_prefix(1);
  if (t.empty()) throw fail("empty number");
  double value = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) throw fail("not a number");
  if (std::isnan(value)) throw fail("not a number");
  return value;
}

}  // namespace netequil
