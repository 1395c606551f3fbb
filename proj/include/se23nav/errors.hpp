#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace se23nav {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotSkewSymmetric : public Error {
 public:
  using Error::Error;
};

class InvalidRotation : public Error {
 public:
  using Error::Error;
};

class NonUnitQuaternion : public Error {
 public:
  using Error::Error;
};

class InsufficientLandmarks : public Error {
 public:
  using Error::Error;
};

class UnknownLandmarkId : public Error {
 public:
  explicit UnknownLandmarkId(int id)
      : Error("unknown landmark id " + std::to_string(id)), id_(id) {}
  int id() const noexcept { return id_; }

 private:
  int id_;
};

class ModeError : public Error {
 public:
  using Error::Error;
};

class NonFiniteState : public Error {
 public:
  using Error::Error;
};

class EmptyStream : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed input. `line` is 1-based; 0 when the error is not tied to a line.
class ParseError : public Error {
 public:
  ParseError(std::string what, std::size_t line, std::string key = {})
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line),
        key_(std::move(key)) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  std::size_t line_;
  std::string key_;
};

class NonMonotonicTime : public ParseError {
 public:
  explicit NonMonotonicTime(std::size_t line)
      : ParseError("timestamp does not increase", line) {}
};

/// A well-formed value that violates a constraint (e.g. a non-positive gain).
class ValidationError : public Error {
 public:
  ValidationError(std::string key, std::string reason)
      : Error(key + ": " + reason), key_(std::move(key)), reason_(std::move(reason)) {}
  const std::string& key() const noexcept { return key_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string key_;
  std::string reason_;
};

}  // namespace se23nav
