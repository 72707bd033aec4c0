#pragma once

#include <stdexcept>
#include <string>

namespace powergrain {

/// Base class for all powergrain errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed source text (procfs, IPMI, perf annotate, rule tables, ...).
class ParseFailure : public Error {
 public:
  using Error::Error;
};

/// A trace/model/workload file violates the schema. Carries the offending
/// line number (0 when the violation is not tied to a single line).
class SchemaViolation : public ParseFailure {
 public:
  SchemaViolation(const std::string& what, std::size_t line = 0)
      : ParseFailure(line > 0 ? "line " + std::to_string(line) + ": " + what
                              : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// File declares a schema version this build does not understand.
class VersionMismatch : public ParseFailure {
 public:
  using ParseFailure::ParseFailure;
};

/// The adapter's underlying file or tool is missing on this host.
class SourceUnavailable : public Error {
 public:
  using Error::Error;
};

/// get_readings() before the first trigger().
class NotTriggered : public Error {
 public:
  using Error::Error;
};

/// Replay observer triggered past the last record.
class EndOfTrace : public Error {
 public:
  using Error::Error;
};

/// No sample weight landed in any model bucket.
class EmptyHistogram : public Error {
 public:
  using Error::Error;
};

/// Input outside an operation's stated domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// RAPL counter range is not positive.
class InvalidRange : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Negative noise standard deviation.
class InvalidNoise : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Paired vectors of different (or zero) length.
class LengthMismatch : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Relative error against a non-positive reference value.
class NonPositiveActual : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Too few records to fit.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// Active-set iteration cap exceeded; input is likely ill-conditioned.
class NoConvergence : public Error {
 public:
  using Error::Error;
};

}  // namespace powergrain
