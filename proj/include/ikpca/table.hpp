#pragma once

#include <string>
#include <vector>

namespace ikpca {

// Rectangular numeric result table: one named header row, double-valued
// cells everywhere else.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// Shortest decimal form with up to 17 significant digits; parsing it back
// recovers the exact double.
std::string format_double(double value);

// Write as CSV: header line, then rows, LF newlines, format_double cells.
// I/O failures throw std::runtime_error naming the path.
void write_csv(const Table& table, const std::string& path);

// Parse a CSV produced by write_csv (header line plus all-numeric rows).
Table read_csv(const std::string& path);

}  // namespace ikpca
