#pragma once

#include <stdexcept>
#include <string>

namespace dicka {

// Base of every error raised by the library. Protocol aborts are not errors;
// they are recorded in the transcript.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SizeOutOfRange : public Error {
 public:
  using Error::Error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace dicka
