// error.hpp - Exception types raised by the emiprior library
//
// This software is licensed under the terms of the Apache Licence Version 2.0
// which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.

#pragma once

#include <stdexcept>
#include <string>

namespace emiprior {

/// Base class of every error thrown by the library. The `kind()` tag is
/// what the CLI prints in its single-line error report.
class Error : public std::runtime_error {
public:
  Error(std::string kind, const std::string& what)
    : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }
private:
  std::string kind_;
};

/// A wavenumber or index outside the valid span.
struct RangeError : Error {
  explicit RangeError(const std::string& w) : Error("range", w) {}
};

/// Two containers that must be aligned have different lengths or grids.
struct AlignmentError : Error {
  explicit AlignmentError(const std::string& w) : Error("alignment", w) {}
};

/// A value violates a domain-type invariant.
struct InvariantError : Error {
  explicit InvariantError(const std::string& w) : Error("invariant", w) {}
};

/// Malformed input file. `row` is 1-based, 0 when the error is not tied
/// to a particular row.
struct ParseError : Error {
  ParseError(const std::string& w, std::size_t row = 0)
    : Error("parse", row ? w + " (row " + std::to_string(row) + ")" : w), row_(row) {}
  std::size_t row() const noexcept { return row_; }
private:
  std::size_t row_;
};

struct InsufficientDataError : Error {
  explicit InsufficientDataError(const std::string& w) : Error("insufficient_data", w) {}
};

struct EmptyFootprintError : Error {
  explicit EmptyFootprintError(const std::string& w) : Error("empty_footprint", w) {}
};

struct NoSelectionError : Error {
  explicit NoSelectionError(const std::string& w) : Error("no_selection", w) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error("config", w) {}
};

} // namespace emiprior
