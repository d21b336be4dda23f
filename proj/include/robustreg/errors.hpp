#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace robustreg {

// Precondition violations: bad shapes, empty inputs, out-of-range parameters.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Base for every failure that originates in the numerics of a fit.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateReference : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularSystem : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConditioningError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateSampling : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoConsensus : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DivergenceError : public NumericalError {
 public:
  DivergenceError(int epoch, const std::string& what)
      : NumericalError(what + " (epoch " + std::to_string(epoch) + ")"), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

// A regressor failure inside the reweighting loop, tagged with the fit index.
class RefinementError : public NumericalError {
 public:
  RefinementError(int refinement, const std::string& what)
      : NumericalError("refinement " + std::to_string(refinement) + ": " + what),
        refinement_(refinement) {}
  int refinement() const noexcept { return refinement_; }

 private:
  int refinement_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public IoError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : IoError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class InvalidDataset : public IoError {
 public:
  using IoError::IoError;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(field), message_(what) {}
  const std::string& field() const noexcept { return field_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::string field_;
  std::string message_;
};

}  // namespace robustreg
