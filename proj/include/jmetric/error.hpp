#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jmetric {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset` is the byte offset into the parsed string.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& what)
      : Error("parse error at offset " + std::to_string(offset) + ": " + what), offset_(offset), reason_(what) {}

  std::size_t offset() const noexcept { return offset_; }
  /// The message without the offset prefix.
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t offset_;
  std::string reason_;
};

/// Evaluation failure at a point (division by zero, dimension mismatch).
class EvalError : public Error {
 public:
  using Error::Error;
};

/// An operation was requested for an (alpha, epsilon) case it does not cover.
class UnsupportedCase : public Error {
 public:
  using Error::Error;
};

/// Adapted-frame construction broke down (pivot below threshold).
class FrameError : public Error {
 public:
  using Error::Error;
};

/// Singular metric or singular frame.
class SingularError : public Error {
 public:
  using Error::Error;
};

}  // namespace jmetric
