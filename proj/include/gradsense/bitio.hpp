#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace gradsense {

/// Appends bits MSB-first within each byte.
class BitWriter {
 public:
  /// Writes the low `count` bits of `value`, most significant first. count <= 64.
  void write(std::uint64_t value, unsigned count);
  void write_bit(bool bit) { write(bit ? 1u : 0u, 1); }

  std::uint64_t bit_count() const noexcept { return bits_; }
  const std::vector<std::uint8_t>& bytes() const noexcept { return bytes_; }
  /// Final byte zero-padded.
  std::vector<std::uint8_t> take() && { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
  std::uint64_t bits_ = 0;
};

/// Reads bits MSB-first from a buffer holding `bit_length` meaningful bits.
/// Reading past the end throws CodecError; `base_offset` is added to reported
/// positions so errors point into the enclosing stream.
class BitReader {
 public:
  BitReader(std::span<const std::uint8_t> bytes, std::uint64_t bit_length,
            std::uint64_t base_offset = 0);

  std::uint64_t read(unsigned count);
  bool read_bit() { return read(1) != 0; }

  /// Next `count` (<= 56) bits without consuming them; bits past the end read as 0.
  std::uint64_t peek(unsigned count) const noexcept;
  void skip(unsigned count);

  std::uint64_t position() const noexcept { return pos_; }
  std::uint64_t remaining() const noexcept { return length_ - pos_; }
  bool at_end() const noexcept { return pos_ >= length_; }
  /// Absolute offset of the current position within the enclosing stream.
  std::uint64_t stream_offset() const noexcept { return base_ + pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::uint64_t length_;
  std::uint64_t base_;
  std::uint64_t pos_ = 0;
};

}  // namespace gradsense
