// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace rext {

enum class ErrorCode {
  Parse = 1,
  UnknownIdentifier,
  Domain,
  Order,
  Singular,
  InvalidArgument,
  Numerical,
  NotFound,
};

/// Base exception for every failure raised by the library. The C API maps
/// `code()` onto its integer status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Syntax errors carry the byte offset of the offending token.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(ErrorCode::Parse, what + " at position " + std::to_string(position)),
        detail_(what),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }
  /// The message without the position suffix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string detail_;
  std::size_t position_;
};

}  // namespace rext
