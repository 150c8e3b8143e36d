#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tricluster {

/// Malformed input row. Carries the 1-based line number of the offending row.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class EmptyDatasetError : public std::runtime_error {
 public:
  EmptyDatasetError() : std::runtime_error("dataset contains no edges") {}
};

/// A vertex is not covered by the supplied partition.
class CoverageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A model violates one of its structural invariants (marginals, degrees, tiling).
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A time merge was requested between intervals that are not adjacent.
class OrderingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Model and data disagree (counts, degrees or edge total differ).
class CompatibilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unsupported JSON document.
class DocumentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace tricluster
