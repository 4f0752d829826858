#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spu::csv {

// RFC-4180 table: a header row followed by data rows. Fields are kept as
// strings; typed access goes through the helpers below.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> find_column(std::string_view name) const;
  // Throws InputError naming the column when absent.
  std::size_t column(std::string_view name) const;
};

Table parse(std::istream& in);
Table read_file(const std::string& path);

// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

// Shortest round-trip decimal representation of a double.
std::string format_double(double value);

double parse_double(std::string_view text, std::string_view context);
long long parse_int(std::string_view text, std::string_view context);

// Empty, "NA", "NaN" or "null" (case-insensitive) count as missing.
bool is_missing(std::string_view text);

}  // namespace spu::csv
