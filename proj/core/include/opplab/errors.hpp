#pragma once

#include <stdexcept>
#include <string>

namespace opplab {

// Base class for every failure raised by the library. Callers that only
// care about "the experiment could not run" catch this one.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// |det Q| below the degeneracy tolerance.
class DegenerateForm : public Error {
 public:
  using Error::Error;
};

// Signature (3,0) or (0,3).
class DefiniteForm : public Error {
 public:
  using Error::Error;
};

// An enumeration would visit more candidates than its configured ceiling.
class CapacityExceeded : public Error {
 public:
  using Error::Error;
};

// A form is not in the congruence class required by the caller.
class SignatureMismatch : public Error {
 public:
  using Error::Error;
};

class NoCandidate : public Error {
 public:
  using Error::Error;
};

class EmptyConfig : public Error {
 public:
  using Error::Error;
};

// Violated precondition on a numeric argument (ranges, counts, grids).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

[[noreturn]] void throw_invalid(const std::string& what);

}  // namespace opplab
