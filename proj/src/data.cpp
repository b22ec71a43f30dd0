#include "pendag/data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "pendag/errors.hpp"

namespace pendag {

DataMatrix::DataMatrix(Eigen::MatrixXd v)
    : values(std::move(v)), names(default_names(static_cast<std::size_t>(values.cols()))) {}

DataMatrix::DataMatrix(Eigen::MatrixXd v, std::vector<std::string> n)
    : values(std::move(v)), names(std::move(n)) {
  if (names.size() != static_cast<std::size_t>(values.cols()))
    throw DimensionMismatch("column name count does not match column count");
}

std::vector<std::string> default_names(std::size_t p) {
  std::vector<std::string> out;
  out.reserve(p);
  for (std::size_t j = 0; j < p; ++j) out.push_back("X" + std::to_string(j + 1));
  return out;
}

DataMatrix reorder_columns(const DataMatrix& x, std::span<const std::size_t> order) {
  const std::size_t p = x.cols();
  if (order.size() != p) throw DomainError("ordering length does not match column count");
  std::vector<bool> seen(p, false);
  for (std::size_t k : order) {
    if (k >= p || seen[k]) throw DomainError("ordering is not a permutation of the columns");
    seen[k] = true;
  }
  DataMatrix out;
  out.values.resize(x.values.rows(), x.values.cols());
  out.names.resize(p);
  for (std::size_t k = 0; k < p; ++k) {
    out.values.col(static_cast<Eigen::Index>(k)) = x.values.col(static_cast<Eigen::Index>(order[k]));
    out.names[k] = x.names[order[k]];
  }
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    std::string f = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    const auto first = f.find_first_not_of(" \t\r\"");
    const auto last = f.find_last_not_of(" \t\r\"");
    fields.push_back(first == std::string::npos ? std::string() : f.substr(first, last - first + 1));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

double parse_double(const std::string& field) {
  double v = 0.0;
  const char* b = field.data();
  const char* e = b + field.size();
  if (!field.empty() && *b == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e || field.empty() || !std::isfinite(v))
    throw ParseError("not a finite number: '" + field + "'");
  return v;
}

DataMatrix read_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    header = split_csv_line(line);
    break;
  }
  if (header.empty()) throw ParseError("empty CSV input");

  const std::size_t p = header.size();
  std::vector<double> flat;  // row-major while reading
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != p)
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(p) +
                       " fields, got " + std::to_string(fields.size()));
    for (const auto& f : fields) {
      try {
        flat.push_back(parse_double(f));
      } catch (const ParseError& e) {
        throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    ++n;
  }
  if (n == 0) throw ParseError("CSV has a header but no data rows");

  Eigen::MatrixXd values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < p; ++c)
      values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = flat[r * p + c];
  return DataMatrix(std::move(values), std::move(header));
}

DataMatrix read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_csv(in);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const DataMatrix& x) {
  for (std::size_t j = 0; j < x.cols(); ++j) out << (j ? "," : "") << x.names[j];
  out << '\n';
  for (Eigen::Index r = 0; r < x.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.values.cols(); ++c)
      out << (c ? "," : "") << format_double(x.values(r, c));
    out << '\n';
  }
}

}  // namespace pendag
