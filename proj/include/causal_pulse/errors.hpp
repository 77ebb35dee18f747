#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace causal_pulse {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A single input record could not be parsed.
class IngestionError : public Error {
 public:
  IngestionError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ConfigurationError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Data does not satisfy a numeric domain (log of a negative value, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class UntransformableError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class AlignmentError : public Error {
 public:
  using Error::Error;
};

/// Zero-variance input to a test that needs variation.
class DegenerateSeriesError : public Error {
 public:
  using Error::Error;
};

class CollinearityError : public Error {
 public:
  using Error::Error;
};

class SelectionError : public Error {
 public:
  using Error::Error;
};

/// Raised when an event cannot be analysed (coverage gap, failed fit,
/// undefined effect). Carries a machine-readable reason for skip reports.
class NonAnalysableError : public Error {
 public:
  using Error::Error;
};

}  // namespace causal_pulse
