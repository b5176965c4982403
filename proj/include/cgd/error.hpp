#pragma once

#include <stdexcept>
#include <string>

namespace cgd {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand lengths or operator shapes disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation (negative MSE, non-unit vector, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Input is well-formed but degenerate (all-zero signal where a norm is divided by).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// A bit stream does not match the layout its code declares.
class DecodeError : public Error {
 public:
  using Error::Error;
};

/// An enumeration or exhaustive search would exceed its configured guard.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// External codec subprocess failed: nonzero exit, timeout or bad output.
class CodecError : public Error {
 public:
  using Error::Error;
};

/// Malformed or unknown configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Signal or record file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cgd
