#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace histnorm {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class EncodingViolation : public Error {
 public:
  using Error::Error;
};

class AlignmentDegenerate : public Error {
 public:
  using Error::Error;
};

class InfeasibleSplit : public Error {
 public:
  using Error::Error;
};

class UnknownType : public Error {
 public:
  using Error::Error;
};

class EmptyTraining : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

class LatticeTooLarge : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class DivisionByZero : public Error {
 public:
  using Error::Error;
};

// Failures talking to an external generator or scorer process.
class ExternalError : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public ExternalError {
 public:
  using ExternalError::ExternalError;
};

class ProcessUnavailable : public ExternalError {
 public:
  using ExternalError::ExternalError;
};

class GeneratorUnavailable : public ProcessUnavailable {
 public:
  using ProcessUnavailable::ProcessUnavailable;
};

class ScorerUnavailable : public ProcessUnavailable {
 public:
  using ProcessUnavailable::ProcessUnavailable;
};

class TimeoutError : public ExternalError {
 public:
  using ExternalError::ExternalError;
};

}  // namespace histnorm
