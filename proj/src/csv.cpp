#include "fdrstab/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace fdrstab {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // trim surrounding whitespace
    std::size_t b = field.find_first_not_of(" \t\r");
    std::size_t e = field.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? ""
                                            : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_number(const std::string& s, int row, int col) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw CsvParseError("malformed numeric field at row " +
                        std::to_string(row) + ", column " +
                        std::to_string(col) + ": '" + s + "'");
  }
}

}  // namespace

CsvTable read_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvParseError("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line))
    throw CsvParseError("'" + path + "' is empty");
  CsvTable table;
  table.header = split_fields(line);
  const std::size_t ncol = table.header.size();

  std::vector<std::vector<double>> rows;
  int row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() != ncol) {
      throw CsvParseError("row " + std::to_string(row_no) + " has " +
                          std::to_string(fields.size()) + " fields, expected " +
                          std::to_string(ncol));
    }
    std::vector<double> row(ncol);
    for (std::size_t j = 0; j < ncol; ++j)
      row[j] = parse_number(fields[j], row_no, static_cast<int>(j + 1));
    rows.push_back(std::move(row));
  }

  table.values = Matrix(rows.size(), ncol);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < ncol; ++j) table.values(i, j) = rows[i][j];
  return table;
}

Vector read_csv_column(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvParseError("cannot open '" + path + "'");
  std::vector<double> values;
  std::string line;
  int row_no = 0;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() != 1)
      throw CsvParseError("row " + std::to_string(row_no) +
                          ": expected a single column");
    if (row_no == 1) {
      // optional header
      try {
        values.push_back(parse_number(fields[0], row_no, 1));
      } catch (const CsvParseError&) {
      }
      continue;
    }
    values.push_back(parse_number(fields[0], row_no, 1));
  }
  Vector v(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) v(i) = values[i];
  return v;
}

void write_csv_matrix(const std::string& path,
                      const std::vector<std::string>& header,
                      const Matrix& values) {
  std::ofstream out(path);
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) out << ',';
    out << header[j];
  }
  out << '\n';
  for (int i = 0; i < values.rows(); ++i) {
    for (int j = 0; j < values.cols(); ++j) {
      if (j) out << ',';
      out << values(i, j);
    }
    out << '\n';
  }
}

}  // namespace fdrstab
