#include "ikpca/dataset.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ikpca/errors.hpp"

namespace ikpca {
namespace {

std::string strip(const std::string& s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin])))
    ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1])))
    --end;
  return s.substr(begin, end - begin);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == sep) {
      fields.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(current);
  return fields;
}

std::vector<std::string> split_whitespace(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream in(line);
  std::string token;
  while (in >> token) fields.push_back(token);
  return fields;
}

bool try_parse_double(const std::string& field, double* out) {
  const std::string token = strip(field);
  if (token.empty()) return false;
  const char* begin = token.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end != begin + token.size()) return false;
  if (!std::isfinite(value)) return false;
  *out = value;
  return true;
}

double parse_double(const std::string& field, long line_number) {
  double value = 0;
  if (!try_parse_double(field, &value))
    throw ParseError("line " + std::to_string(line_number) +
                     ": cannot parse numeric field '" + strip(field) + "'");
  return value;
}

Vector<double> parse_fields(const std::vector<std::string>& fields,
                            std::size_t begin, std::size_t end,
                            long line_number) {
  Vector<double> row(static_cast<Index>(end - begin));
  for (std::size_t i = begin; i < end; ++i)
    row[static_cast<Index>(i - begin)] = parse_double(fields[i], line_number);
  return row;
}

Vector<double> parse_generic_row(const std::string& line, long line_number) {
  const auto fields = split(line, ',');
  return parse_fields(fields, 0, fields.size(), line_number);
}

bool generic_row_is_header(const std::string& line) {
  double ignored = 0;
  for (const auto& field : split(line, ','))
    if (!try_parse_double(field, &ignored)) return true;
  return false;
}

}  // namespace

Vector<double> parse_magic_row(const std::string& line, long line_number) {
  const auto fields = split(line, ',');
  if (fields.size() != 11)
    throw ParseError("line " + std::to_string(line_number) +
                     ": expected 11 comma-separated fields, got " +
                     std::to_string(fields.size()));
  // Final field is the g/h class label; dropped.
  return parse_fields(fields, 0, 10, line_number);
}

Vector<double> parse_yeast_row(const std::string& line, long line_number) {
  const auto fields = split_whitespace(line);
  if (fields.size() != 10)
    throw ParseError("line " + std::to_string(line_number) +
                     ": expected 10 whitespace-separated fields, got " +
                     std::to_string(fields.size()));
  // First field is the sequence name, last the class label; both dropped.
  return parse_fields(fields, 1, 9, line_number);
}

std::vector<Vector<double>> load_dataset(const std::string& path,
                                         DatasetKind kind) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dataset file '" + path + "'");
  std::vector<Vector<double>> points;
  std::string raw;
  long line_number = 0;
  bool first_content_row = true;
  while (std::getline(in, raw)) {
    ++line_number;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (strip(raw).empty()) continue;
    if (kind == DatasetKind::GenericCsv && first_content_row &&
        generic_row_is_header(raw)) {
      first_content_row = false;
      continue;
    }
    first_content_row = false;
    Vector<double> row;
    switch (kind) {
      case DatasetKind::Magic:
        row = parse_magic_row(raw, line_number);
        break;
      case DatasetKind::Yeast:
        row = parse_yeast_row(raw, line_number);
        break;
      case DatasetKind::GenericCsv:
        row = parse_generic_row(raw, line_number);
        break;
    }
    if (!points.empty() && row.size() != points.front().size())
      throw ParseError("line " + std::to_string(line_number) +
                       ": inconsistent column count");
    points.push_back(std::move(row));
  }
  if (points.empty())
    throw ParseError("dataset file '" + path + "' contains no data rows");
  return points;
}

}  // namespace ikpca
