#pragma once

#include <stdexcept>
#include <string>

namespace qcforge {

// Root of every error the library raises. The CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exit code 2.
class ParseError : public Error {
 public:
  using Error::Error;
};

class SyntaxError : public ParseError {
 public:
  SyntaxError(const std::string& msg, int line, int column)
      : ParseError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class DuplicateDifferential : public ParseError {
 public:
  using ParseError::ParseError;
};

class IndexOutOfRange : public ParseError {
 public:
  using ParseError::ParseError;
};

class UnknownName : public ParseError {
 public:
  using ParseError::ParseError;
};

// Exit code 4.
class DomainError : public Error {
 public:
  using Error::Error;
};

class DivisionByZero : public DomainError {
 public:
  DivisionByZero() : DomainError("division by zero") {}
};

class SingularCoframe : public DomainError {
 public:
  using DomainError::DomainError;
};

// Exit code 3.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class FrameMismatch : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class ArityMismatch : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class BadOrientation : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class NonAntisymmetricTorsion : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class NotEinsteinBase : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class UnderdeterminedDifferential : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

// Exit code 1: the input was well formed but a geometric identity failed.
class VerificationError : public Error {
 public:
  using Error::Error;
};

class InconsistentScalar : public VerificationError {
 public:
  using VerificationError::VerificationError;
};

class DecompositionResidual : public VerificationError {
 public:
  using VerificationError::VerificationError;
};

class ConsistencyError : public VerificationError {
 public:
  using VerificationError::VerificationError;
};

}  // namespace qcforge
