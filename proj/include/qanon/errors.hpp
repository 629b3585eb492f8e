// Error types shared by every qanon module.
#pragma once

#include <stdexcept>
#include <string>

namespace qanon {

/// A call that breaks the rules of the protocol itself (gate on a collapsed
/// qubit, out-of-turn broadcast, teleporting over a missing pair).
class ProtocolViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The scenario was wired up inconsistently (wrong source size, a strategy
/// asked to do something outside the protocol it applies to).
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact enumeration would exceed its budget; callers fall back to sampling.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace qanon
