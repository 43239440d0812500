#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace famrl::csv {

/// Shortest decimal form that parses back to the same double.
std::string format(double value);
double parse_double(std::string_view text);

/// Splits on commas; surrounding whitespace of each field is trimmed. No quoting.
std::vector<std::string> split(std::string_view line);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index of `name`; throws SchemaViolation when absent.
  std::size_t column(std::string_view name) const;
};

/// Reads a header line and rows; blank lines and lines starting with '#' are skipped.
/// Throws SchemaViolation on ragged rows.
Table read(std::istream& in);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace famrl::csv
