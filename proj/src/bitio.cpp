#include "gradsense/bitio.hpp"

#include "gradsense/error.hpp"

namespace gradsense {

void BitWriter::write(std::uint64_t value, unsigned count) {
  while (count > 0) {
    const unsigned used = static_cast<unsigned>(bits_ % 8);
    if (used == 0) bytes_.push_back(0);
    const unsigned room = 8 - used;
    const unsigned take = count < room ? count : room;
    const auto chunk = static_cast<std::uint8_t>((value >> (count - take)) & ((1u << take) - 1));
    bytes_.back() |= static_cast<std::uint8_t>(chunk << (room - take));
    count -= take;
    bits_ += take;
  }
}

BitReader::BitReader(std::span<const std::uint8_t> bytes, std::uint64_t bit_length,
                     std::uint64_t base_offset)
    : bytes_(bytes), length_(bit_length), base_(base_offset) {
  if (bit_length > bytes.size() * 8) {
    throw CodecError("section shorter than its declared bit length", base_offset);
  }
}

std::uint64_t BitReader::peek(unsigned count) const noexcept {
  // count <= 56: an 8-byte window always covers it after the sub-byte shift.
  if (count == 0) return 0;
  const std::size_t first = static_cast<std::size_t>(pos_ / 8);
  std::uint64_t window = 0;
  for (std::size_t i = 0; i < 8; ++i) {
    window = (window << 8) | (first + i < bytes_.size() ? bytes_[first + i] : 0u);
  }
  window <<= pos_ % 8;
  std::uint64_t out = window >> (64 - count);
  if (pos_ + count > length_) {
    const std::uint64_t excess = pos_ + count - length_;
    out = excess >= count ? 0 : out & ~((std::uint64_t{1} << excess) - 1);
  }
  return out;
}

std::uint64_t BitReader::read(unsigned count) {
  if (count > remaining()) throw CodecError("unexpected end of section", stream_offset());
  std::uint64_t out = 0;
  while (count > 0) {
    const unsigned offset = static_cast<unsigned>(pos_ % 8);
    const unsigned avail = 8 - offset;
    const unsigned take = count < avail ? count : avail;
    const unsigned byte = bytes_[pos_ / 8];
    const unsigned chunk = (byte >> (avail - take)) & ((1u << take) - 1);
    out = (out << take) | chunk;
    pos_ += take;
    count -= take;
  }
  return out;
}

void BitReader::skip(unsigned count) {
  if (count > remaining()) throw CodecError("unexpected end of section", stream_offset());
  pos_ += count;
}

}  // namespace gradsense
