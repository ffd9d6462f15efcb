#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dirac {

/// Shortest locale-independent representation with 17 significant digits.
std::string format_number(double value);

void write_csv_row(std::ostream& out, std::span<const double> values);
void write_csv_header(std::ostream& out, std::span<const std::string> columns);

/// Parsed CSV body. Lines starting with '#' are collected into `comments`.
struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Index of a named column; throws Error(Config) when absent.
  std::size_t column(std::string_view name) const;
  std::vector<double> column_values(std::string_view name) const;
};

CsvTable read_csv(std::istream& in);

}  // namespace dirac
