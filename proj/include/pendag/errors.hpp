#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pendag {

// Base for every error raised by the library. The CLI maps subclasses onto
// exit codes, so new error kinds should derive from one of these.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InfeasibleSpec : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ConstantColumn : public Error {
 public:
  ConstantColumn(std::size_t column, const std::string& name)
      : Error("column " + std::to_string(column + 1) + " ('" + name + "') has zero variance"),
        column_(column),
        name_(name) {}

  std::size_t column() const noexcept { return column_; }
  const std::string& name() const noexcept { return name_; }

 private:
  std::size_t column_;
  std::string name_;
};

}  // namespace pendag
