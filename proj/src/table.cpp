#include "ikpca/table.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ikpca/errors.hpp"

namespace ikpca {

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void write_csv(const Table& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary keeps newlines LF
  if (!out) throw std::runtime_error("write_csv: cannot open '" + path + "'");
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out << ',';
    out << table.header[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << format_double(row[i]);
    }
    out << '\n';
  }
  out.flush();
  if (!out) throw std::runtime_error("write_csv: write failed for '" + path + "'");
}

Table read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("read_csv: cannot open '" + path + "'");
  Table table;
  std::string line;
  long line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
      if (c == ',') {
        fields.push_back(current);
        current.clear();
      } else {
        current.push_back(c);
      }
    }
    fields.push_back(current);
    if (line_number == 1) {
      table.header = fields;
      continue;
    }
    if (fields.size() != table.header.size())
      throw ParseError("read_csv: line " + std::to_string(line_number) +
                       ": expected " + std::to_string(table.header.size()) +
                       " columns, found " + std::to_string(fields.size()));
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& field : fields) {
      const char* begin = field.c_str();
      char* end = nullptr;
      const double value = std::strtod(begin, &end);
      if (end != begin + field.size() || field.empty())
        throw ParseError("read_csv: line " + std::to_string(line_number) +
                         ": cannot parse numeric field '" + field + "'");
      row.push_back(value);
    }
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty())
    throw ParseError("read_csv: '" + path + "' has no header row");
  return table;
}

}  // namespace ikpca
