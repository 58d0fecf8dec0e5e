#pragma once

#include <stdexcept>
#include <string>

namespace sparsescan {

// Root of the library's exception hierarchy. The CLI maps the two leaf
// families onto exit codes (validation = 2, io = 3).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inputs that violate a type invariant or an operation precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Missing, unreadable, unwritable, or malformed files.
class IoError : public Error {
 public:
  using Error::Error;
};

// A file was opened but its contents do not parse.
class FormatError : public IoError {
 public:
  using IoError::IoError;
};

[[noreturn]] void throw_validation(const std::string& message);

}  // namespace sparsescan
