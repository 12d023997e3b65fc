#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "gradsense/bitio.hpp"

namespace gradsense {

inline constexpr std::size_t kCounterAlphabet = 256;

using SymbolHistogram = std::array<std::uint64_t, kCounterAlphabet>;
using CodeLengths = std::array<std::uint8_t, kCounterAlphabet>;

SymbolHistogram histogram(std::span<const std::uint8_t> symbols);

/// Canonical Huffman code over byte symbols. Only the code lengths are
/// serialized; codes are assigned in (length, symbol) order. A histogram with a
/// single used symbol gets a 1-bit code; an empty histogram gets no codes.
class HuffmanTable {
 public:
  HuffmanTable() = default;

  /// Ties between equal weights are broken by the smallest symbol in each subtree,
  /// so equal histograms always give equal tables.
  static HuffmanTable build(const SymbolHistogram& hist);

  /// Rebuilds the codes from serialized lengths. Throws CodecError at
  /// `bit_offset` unless the lengths form a complete prefix code (or a single
  /// 1-bit code, or no codes at all).
  static HuffmanTable from_lengths(const CodeLengths& lengths, std::uint64_t bit_offset = 0);

  const CodeLengths& lengths() const noexcept { return lengths_; }
  std::uint8_t length(std::uint8_t symbol) const noexcept { return lengths_[symbol]; }
  std::uint64_t code(std::uint8_t symbol) const noexcept { return codes_[symbol]; }
  bool empty() const noexcept { return max_length_ == 0; }
  unsigned max_length() const noexcept { return max_length_; }

  /// Throws InvalidArgument if a symbol has no code.
  void encode(std::span<const std::uint8_t> symbols, BitWriter& out) const;
  std::uint64_t encoded_bits(const SymbolHistogram& hist) const;

  /// Decodes one symbol; CodecError on an invalid or truncated code.
  std::uint8_t decode_one(BitReader& in) const;
  /// Decodes symbols until the reader is exhausted.
  std::vector<std::uint8_t> decode_all(BitReader& in) const;

 private:
  static constexpr unsigned kFastBits = 10;
  struct FastEntry {
    std::uint8_t symbol = 0;
    std::uint8_t length = 0;  // 0: code longer than kFastBits, take the slow path
  };

  void assign_codes();

  CodeLengths lengths_{};
  std::array<std::uint64_t, kCounterAlphabet> codes_{};
  unsigned max_length_ = 0;
  // Canonical decoding tables: codes per length and symbols sorted by (length, symbol).
  std::vector<std::uint32_t> count_per_length_;
  std::vector<std::uint8_t> sorted_symbols_;
  std::vector<FastEntry> fast_;
};

/// Serialized form of a code-length list: u16 little-endian pair count followed
/// by (length, repeat - 1) byte pairs covering all 256 symbols.
void write_code_lengths(const CodeLengths& lengths, std::vector<std::uint8_t>& out);

/// Parses the form above starting at `pos`, advancing it. CodecError on malformed input.
CodeLengths read_code_lengths(std::span<const std::uint8_t> bytes, std::size_t& pos);

/// Shannon entropy of the histogram in bits per symbol.
double entropy_bits_per_symbol(const SymbolHistogram& hist);

}  // namespace gradsense
