#ifndef EBM_ERRORS_HPP
#define EBM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ebm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Operation not allowed in the object's current state (e.g. double scaling).
class InvalidState : public Error {
 public:
  using Error::Error;
};

/// Malformed IDX or model file.
class FormatError : public Error {
 public:
  using Error::Error;
};

class UnsupportedVersion : public Error {
 public:
  using Error::Error;
};

/// Brute-force enumeration requested beyond its size bound.
class CapacityError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite parameter.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace ebm

#endif  // EBM_ERRORS_HPP
