#pragma once
// Observation matrices and their CSV form: a header row of variable names
// followed by one numeric row per observation.

#include <Eigen/Dense>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace pendag {

struct DataMatrix {
  Eigen::MatrixXd values;  // n x p, column-major so each variable is contiguous
  std::vector<std::string> names;

  DataMatrix() = default;
  // Names default to X1..Xp.
  explicit DataMatrix(Eigen::MatrixXd v);
  DataMatrix(Eigen::MatrixXd v, std::vector<std::string> n);

  std::size_t rows() const noexcept { return static_cast<std::size_t>(values.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(values.cols()); }

  std::span<const double> column(std::size_t j) const {
    return {values.col(static_cast<Eigen::Index>(j)).data(), rows()};
  }
  std::span<double> column(std::size_t j) {
    return {values.col(static_cast<Eigen::Index>(j)).data(), rows()};
  }
};

std::vector<std::string> default_names(std::size_t p);

// Output column k is input column order[k]. Throws DomainError unless
// `order` is a permutation of 0..p-1.
DataMatrix reorder_columns(const DataMatrix& x, std::span<const std::size_t> order);

// Throws ParseError with a line number on malformed input.
DataMatrix read_csv(std::istream& in);
DataMatrix read_csv_file(const std::string& path);
void write_csv(std::ostream& out, const DataMatrix& x);

// Shortest decimal that parses back to the same double.
std::string format_double(double v);

// Splits one CSV line on commas and trims surrounding whitespace and quotes.
std::vector<std::string> split_csv_line(const std::string& line);

// Throws ParseError unless the whole field is a finite number.
double parse_double(const std::string& field);

}  // namespace pendag
