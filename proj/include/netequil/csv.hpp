#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace netequil {

/// A parsed CSV document. `line[i]` is the 1-based physical line on which
/// record `rows[i]` starts, so errors can point back into the file.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line;

  /// Index of `name` in the header, or npos.
  std::size_t column(std::string_view name) const;
};

/// RFC 4180 reader: quoted fields may hold commas, quotes ("") and newlines;
/// CRLF is accepted. Blank lines are skipped. Throws ParseError naming the
/// line when a quote is unterminated or a row's width differs from the
/// header's.
CsvTable read_csv(std::istream& in);

/// Writes one record terminated by LF, quoting only fields that need it.
void write_csv_row(std::ostream& out, std::span<const std::string> fields);

/// 12 significant digits, the precision of every numeric output column.
std::string format_number(double x);

/// Shortest text that parses back to exactly `x`.
std::string format_exact(double x);

/// Parses a whole field as a double (accepting inf). Throws ParseError
/// "line L, column C: ..." on anything else.
double parse_number(std::string_view text, std::size_t line, std::string_view column);

}  // namespace netequil
