#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dkm {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument or configuration (negative bandwidth, K > n, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed input file. `line()` is 1-based; 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Eigensolver failure, NaN iterates, degenerate bandwidths.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Algorithm 1 found no eligible cluster count.
class SelectionError : public Error {
 public:
  using Error::Error;
};

// Exhaustive enumeration would exceed its size guard.
class SizeError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace dkm
