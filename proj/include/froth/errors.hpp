#pragma once

#include <stdexcept>
#include <string>

namespace froth {

// Base of everything the library throws.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad input: parameters, files, preconditions. CLI exit code 1.
struct InputError : Error {
  using Error::Error;
};

// A numerical procedure did not converge. CLI exit code 2.
struct NumericalError : Error {
  using Error::Error;
};

struct SubcriticalError : InputError { using InputError::InputError; };
struct DomainError : InputError { using InputError::InputError; };
struct ValidationError : InputError { using InputError::InputError; };
struct AlignmentError : InputError { using InputError::InputError; };
struct DomainTooShort : InputError { using InputError::InputError; };
struct InvariantError : InputError { using InputError::InputError; };
struct MissingBoundaryData : InputError { using InputError::InputError; };
struct SignError : InputError { using InputError::InputError; };
struct ValueError : InputError { using InputError::InputError; };
struct ParameterError : InputError { using InputError::InputError; };
struct CellTooShort : InputError { using InputError::InputError; };

struct ParseError : InputError {
  ParseError(const std::string& what, int line = 0)
      : InputError(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// JSON config error carrying the offending JSON pointer.
struct ConfigError : InputError {
  ConfigError(const std::string& pointer, const std::string& what)
      : InputError(pointer + ": " + what), pointer_(pointer) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

struct NonConvergence : NumericalError { using NumericalError::NumericalError; };
struct FitError : NumericalError { using NumericalError::NumericalError; };
struct BracketError : NumericalError { using NumericalError::NumericalError; };
struct LineSearchFailure : NumericalError { using NumericalError::NumericalError; };

// A certificate check failed. CLI exit code 3.
struct CertificateFailure : Error {
  using Error::Error;
};

}  // namespace froth
