#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "gradsense/huffman.hpp"
#include "gradsense/sensor.hpp"

namespace gradsense {

inline constexpr char kStreamMagic[4] = {'G', 'C', 'V', '1'};

/// Self-describing `.gcs` stream for one gradient map. See docs/gcs_format.md
/// for the byte layout.
struct EncodedStream {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  SchemeId scheme = SchemeId::OneDir1p5Bit;
  Direction direction = Direction::X;
  std::vector<std::int16_t> thresholds;  // 8-bit units
  std::int8_t first_level = 0;
  CodeLengths code_lengths{};

  std::uint32_t value_bits = 0;
  std::vector<std::uint8_t> value_section;  // transition codes, zero-padded to a byte
  std::uint32_t counter_bits = 0;
  std::vector<std::uint8_t> counter_section;  // Huffman-coded counter segments

  std::vector<std::uint8_t> serialize() const;

  /// Validates everything except the section payloads, which are checked by decode().
  /// Throws CodecError with the failing bit offset.
  static EncodedStream parse(std::span<const std::uint8_t> bytes);

  std::size_t header_bytes() const;
  std::size_t byte_size() const;
  /// Serialized size in bits, header and padding included.
  std::uint64_t total_bits() const { return static_cast<std::uint64_t>(byte_size()) * 8; }

  friend bool operator==(const EncodedStream&, const EncodedStream&) = default;
};

EncodedStream encode(const GradientMap& map);

/// Throws CodecError on any inconsistency (desynchronized Huffman data, run
/// lengths not covering the map, unused transition codes, ...).
GradientMap decode(const EncodedStream& stream);

std::vector<std::uint8_t> encode_bytes(const GradientMap& map);
GradientMap decode_bytes(std::span<const std::uint8_t> bytes);

void write_stream_file(const EncodedStream& stream, const std::filesystem::path& path);
EncodedStream read_stream_file(const std::filesystem::path& path);

/// total_bits / (width * height * baseline_bits_per_pixel).
double compression_ratio(const EncodedStream& stream, double baseline_bits_per_pixel = 8.0);

}  // namespace gradsense
