#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace corder {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Input is empty, zero, or otherwise too small for the operation.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// A closed form hits a vanishing denominator.
class SingularityError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A call sequence contract was broken (e.g. a stale forward cache).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Witness recovery could not decide between constant and non-linear g.
class InconclusiveWitnessError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  DivergenceError(std::string parameter, const std::string& what)
      : Error(what), parameter_(std::move(parameter)) {}

  const std::string& parameter() const noexcept { return parameter_; }

 private:
  std::string parameter_;
};

}  // namespace corder
