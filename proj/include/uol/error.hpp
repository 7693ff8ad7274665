#pragma once

#include <stdexcept>
#include <string>

namespace uol {

enum class ErrorKind {
  kInvalidInput,
  kResourceLimit,
  kRange,
  kIncompleteFactorization,
  kIo,
  kPartialResult,
};

/// Base class of every error raised by the library. The kind decides the
/// CLI exit code: invalid input maps to 1, everything else to 2.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& what)
      : Error(ErrorKind::kInvalidInput, what) {}
};

class ResourceLimit : public Error {
 public:
  explicit ResourceLimit(const std::string& what,
                         ErrorKind kind = ErrorKind::kResourceLimit)
      : Error(kind, what) {}
};

class RangeError : public Error {
 public:
  explicit RangeError(const std::string& what)
      : Error(ErrorKind::kRange, what) {}
};

class IncompleteFactorization : public Error {
 public:
  explicit IncompleteFactorization(const std::string& what)
      : Error(ErrorKind::kIncompleteFactorization, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::kIo, what) {}
};

}  // namespace uol
