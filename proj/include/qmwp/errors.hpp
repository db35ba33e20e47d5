#pragma once

#include <stdexcept>
#include <string>

namespace qmwp {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A physical parameter is outside its valid domain.
class ParameterError : public Error {
 public:
  ParameterError(const std::string& field, const std::string& what)
      : Error(field + ": " + what), field_(field) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// The experiment configuration is malformed or inconsistent.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A precondition on the input data (e.g. sortedness) does not hold.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Time-tag to T3 conversion failed.
class RecordError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Analysis could not produce a result: base of the no-peak and
/// degenerate-input failures.
class AnalysisError : public Error {
 public:
  using Error::Error;
};

class NoPeakError : public AnalysisError {
 public:
  using AnalysisError::AnalysisError;
};

class DegenerateInputError : public AnalysisError {
 public:
  using AnalysisError::AnalysisError;
};

class FitError : public AnalysisError {
 public:
  using AnalysisError::AnalysisError;
};

/// Numerical grid does not resolve the quantities it must represent.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

}  // namespace qmwp
