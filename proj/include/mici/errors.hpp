#pragma once

#include <stdexcept>
#include <string>

namespace mici {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration (grid size, host count, allocator id, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Cell id outside the grid.
class LookupError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Channel-group labeling produced adjacent cells sharing a group.
class LabelingError : public Error {
 public:
  using Error::Error;
};

/// A borrow plan no longer fits the live cell state.
class FeasibilityError : public Error {
 public:
  using Error::Error;
};

/// Internal bookkeeping broke (ledger out of sync, conservation violated).
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// Caller broke an operation's precondition.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Bad command line or config file value. `key()` names the offending setting.
class UsageError : public Error {
 public:
  UsageError(std::string key, const std::string& message)
      : Error(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Malformed CSV input. `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Filesystem failure (unwritable output directory, unreadable file).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace mici
