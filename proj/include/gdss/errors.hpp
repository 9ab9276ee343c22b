#pragma once

#include <stdexcept>
#include <string>

namespace gdss {

// Exit codes used by the command-line tool.
enum class ExitCode : int {
  kSuccess = 0,
  kUsage = 2,
  kData = 3,
  kNumerical = 4,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode exit_code() const noexcept = 0;
};

// Bad arguments to a public function or the CLI.
class UsageError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kUsage; }
};

// Distribution parameters outside the admissible domain.
class ParameterDomainError : public UsageError {
 public:
  using UsageError::UsageError;
};

// Malformed input files, invalid group specifications, inconsistent shapes.
class DataError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kData; }
};

class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : DataError(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Factorisation failures and other loss of numerical validity.
class NumericalError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kNumerical; }
};

// No candidate model survived admissibility checks.
class SelectionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace gdss
