#pragma once

#include <stdexcept>
#include <string>

namespace aps {

/// Base class of every error raised by the engine.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An argument or concern id that is not part of the graph/vocabulary.
class LookupError : public Error {
public:
  using Error::Error;
};

/// A value outside the mathematical domain of an operation.
class DomainError : public Error {
public:
  using Error::Error;
};

/// Method of moments precondition failed (variance zero or too large).
class EstimationError : public Error {
public:
  using Error::Error;
};

/// Propagation found an attack cycle it cannot evaluate.
class CyclicGraphError : public Error {
public:
  using Error::Error;
};

/// A move or dialogue breaks one of the eight protocol conditions.
class ProtocolViolation : public Error {
public:
  ProtocolViolation(int condition, const std::string& what)
      : Error("protocol condition " + std::to_string(condition) + ": " + what),
        condition_(condition) {}

  int condition() const noexcept { return condition_; }

private:
  int condition_;
};

/// Malformed input file. Carries the 1-based line of the offending value when known.
class FormatError : public Error {
public:
  FormatError(const std::string& source, int line, const std::string& what)
      : Error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}

  int line() const noexcept { return line_; }

private:
  int line_;
};

}  // namespace aps
