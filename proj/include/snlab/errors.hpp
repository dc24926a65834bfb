#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace snlab {

enum class ErrorKind {
  invalid_argument,
  contract_violation,
  numerical_blowup,
  convergence,
  resolution,
  step_size,
  parse,
  validation,
};

/// Base of every error raised by the library. The kind selects the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(ErrorKind::invalid_argument, what) {}
};

class ContractViolation : public Error {
 public:
  explicit ContractViolation(const std::string& what) : Error(ErrorKind::contract_violation, what) {}
};

class NumericalBlowup : public Error {
 public:
  NumericalBlowup(long step, const std::string& what)
      : Error(ErrorKind::numerical_blowup, what + " (step " + std::to_string(step) + ")"), step_(step) {}
  NumericalBlowup(long step, std::uint64_t seed, const std::string& what)
      : Error(ErrorKind::numerical_blowup,
              what + " (step " + std::to_string(step) + ", seed " + std::to_string(seed) + ")"),
        step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(double residual, const std::string& what)
      : Error(ErrorKind::convergence, what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class ResolutionError : public Error {
 public:
  explicit ResolutionError(const std::string& what) : Error(ErrorKind::resolution, what) {}
};

class StepSizeError : public Error {
 public:
  explicit StepSizeError(const std::string& what) : Error(ErrorKind::step_size, what) {}
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error(ErrorKind::parse, "line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(ErrorKind::validation, field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace snlab
