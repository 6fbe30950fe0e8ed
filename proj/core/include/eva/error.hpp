#pragma once

#include <stdexcept>
#include <string>

namespace eva {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration values or combinations.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed input files. The message carries the offending line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  [[nodiscard]] int line() const { return line_; }

 private:
  int line_;
};

/// An EV whose charging request cannot be met within its limits.
class FeasibilityError : public Error {
 public:
  FeasibilityError(const std::string& what, int ev_id)
      : Error("EV " + std::to_string(ev_id) + ": " + what), ev_id_(ev_id) {}
  [[nodiscard]] int ev_id() const { return ev_id_; }

 private:
  int ev_id_;
};

/// A caller broke an operation's documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Internal invariant broken, usually meaning an upstream solver bug.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Incomplete or inconsistent accounting inputs.
class AccountingError : public Error {
 public:
  using Error::Error;
};

}  // namespace eva
