#pragma once

#include <string>

#include "fdrstab/types.hpp"

namespace fdrstab {

struct CsvParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CsvTable {
  std::vector<std::string> header;
  Matrix values;
};

// Numeric CSV with one header row; throws CsvParseError with the offending
// row/column on malformed input.
CsvTable read_csv_matrix(const std::string& path);

// Single numeric column, with or without a header.
Vector read_csv_column(const std::string& path);

void write_csv_matrix(const std::string& path,
                      const std::vector<std::string>& header,
                      const Matrix& values);

}  // namespace fdrstab
