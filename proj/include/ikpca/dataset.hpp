#pragma once

#include <string>
#include <vector>

#include "ikpca/types.hpp"

namespace ikpca {

// Supported input schemas.
//  - Magic: 10 comma-separated numeric features, trailing g/h class dropped.
//  - Yeast: whitespace-separated; leading sequence name and trailing class
//    label dropped, 8 numeric features kept.
//  - GenericCsv: all-numeric comma-separated columns; a non-numeric first
//    row is treated as a header and skipped.
enum class DatasetKind { Magic, Yeast, GenericCsv };

// Parse a dataset file into feature vectors.  Throws ParseError naming the
// line on malformed rows and on files without any data rows.
std::vector<Vector<double>> load_dataset(const std::string& path,
                                         DatasetKind kind);

// Single-row parsers, exposed for tests.
Vector<double> parse_magic_row(const std::string& line, long line_number);
Vector<double> parse_yeast_row(const std::string& line, long line_number);

}  // namespace ikpca
