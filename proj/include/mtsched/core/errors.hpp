#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mts {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration text. `line` is 0 when the location is unknown.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::string key, std::size_t line = 0)
      : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what), key_(std::move(key)), line_(line) {}
  const std::string& key() const noexcept { return key_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string key_;
  std::size_t line_;
};

/// A value parsed fine but violates an invariant.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& why)
      : Error(field + ": " + why), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// NaN or infinity appeared while processing a batch.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, std::size_t step)
      : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace mts
