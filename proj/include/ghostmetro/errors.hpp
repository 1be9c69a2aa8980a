// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ghostmetro {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Caller broke a precondition that is not a numeric domain issue
/// (mismatched grids, oracle scale guards, moment orders beyond a jet).
class ContractViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// A truncation window would exceed its configured cap.
class TruncationError : public std::runtime_error {
public:
  TruncationError(const std::string& what, std::size_t mode)
      : std::runtime_error(what), mode_(mode) {}

  /// Zero-based index of the mode whose tail drives the overflow.
  std::size_t mode() const noexcept { return mode_; }

private:
  std::size_t mode_;
};

class SingularEstimatorError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file; line() is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

}  // namespace ghostmetro
