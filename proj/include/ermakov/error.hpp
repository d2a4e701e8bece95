#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ermakov {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text: expressions, vector-field notation, config files.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Scenario or argument shape problems (missing keys, wrong variable sets).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A mathematical operation left its domain: log of a non-positive value,
/// division by zero, a sign change where constant sign is required, ...
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The integrator reached the 1/x^3 singularity.
class SingularityError : public DomainError {
 public:
  SingularityError(const std::string& what, double t, double value)
      : DomainError(what), t_(t), value_(value) {}

  double time() const noexcept { return t_; }
  double value() const noexcept { return value_; }

 private:
  double t_;
  double value_;
};

/// A checked property does not hold (reality condition, failed relation).
class VerificationError : public Error {
 public:
  using Error::Error;
};

}  // namespace ermakov
