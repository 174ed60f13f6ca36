#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kgalign {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what), file_(file), line_(line) {}

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

// Input parsed fine but violates a data invariant (unknown id, duplicate pair, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Operands with incompatible shapes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

}  // namespace kgalign
