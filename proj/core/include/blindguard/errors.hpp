#pragma once

#include <stdexcept>
#include <string>

namespace blindguard {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation was violated.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// An object was used in a state that forbids the call (e.g. a second backward pass).
class StateError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class IntegrityError : public Error {
 public:
  using Error::Error;
};

class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  TrainingError(const std::string& what, int epoch) : Error(what), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class UndefinedRatioError : public Error {
 public:
  using Error::Error;
};

/// Raised by the key gate. Deliberately not derived from any other library error
/// category so callers can tell a denial apart from every other failure.
class AccessDenied : public Error {
 public:
  using Error::Error;
};

}  // namespace blindguard
