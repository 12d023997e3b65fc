#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gradsense {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or violated precondition (bad factor, dimension mismatch, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written, or has an unsupported layout.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed or truncated `.gcs` stream. Carries the bit offset where decoding failed.
class CodecError : public Error {
 public:
  CodecError(const std::string& what, std::uint64_t bit_offset)
      : Error(what + " (at bit " + std::to_string(bit_offset) + ")"), bit_offset_(bit_offset) {}

  std::uint64_t bit_offset() const noexcept { return bit_offset_; }

 private:
  std::uint64_t bit_offset_;
};

/// Pipeline configuration is invalid (maps to CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace gradsense
