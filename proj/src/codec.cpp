#include "gradsense/codec.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "gradsense/bitio.hpp"
#include "gradsense/rlc.hpp"

namespace gradsense {
namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class ByteCursor {
 public:
  explicit ByteCursor(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint8_t u8(const char* field) {
    need(1, field);
    return bytes_[pos_++];
  }
  std::uint16_t u16(const char* field) {
    need(2, field);
    const auto v = static_cast<std::uint16_t>(bytes_[pos_] | bytes_[pos_ + 1] << 8);
    pos_ += 2;
    return v;
  }
  std::uint32_t u32(const char* field) {
    need(4, field);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | bytes_[pos_ + i];
    pos_ += 4;
    return v;
  }
  std::span<const std::uint8_t> take(std::size_t n, const char* field) {
    need(n, field);
    const auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  std::size_t& pos() { return pos_; }
  std::uint64_t bit_offset() const { return pos_ * 8; }
  std::span<const std::uint8_t> bytes() const { return bytes_; }

 private:
  void need(std::size_t n, const char* field) const {
    if (pos_ + n > bytes_.size()) {
      throw CodecError(std::string("truncated stream reading ") + field, pos_ * 8);
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::size_t section_bytes(std::uint64_t bits) { return static_cast<std::size_t>((bits + 7) / 8); }

QuantScheme stream_scheme(const EncodedStream& s) {
  std::vector<int> thresholds(s.thresholds.begin(), s.thresholds.end());
  return QuantScheme::make(s.scheme, std::move(thresholds));
}

}  // namespace

std::vector<std::uint8_t> EncodedStream::serialize() const {
  std::vector<std::uint8_t> out;
  out.reserve(byte_size());
  out.insert(out.end(), std::begin(kStreamMagic), std::end(kStreamMagic));
  put_u32(out, width);
  put_u32(out, height);
  out.push_back(static_cast<std::uint8_t>(scheme));
  out.push_back(static_cast<std::uint8_t>(direction));
  out.push_back(static_cast<std::uint8_t>(thresholds.size()));
  for (std::int16_t t : thresholds) put_u16(out, static_cast<std::uint16_t>(t));
  out.push_back(static_cast<std::uint8_t>(first_level));
  write_code_lengths(code_lengths, out);
  put_u32(out, value_bits);
  put_u32(out, counter_bits);
  out.insert(out.end(), value_section.begin(), value_section.end());
  out.insert(out.end(), counter_section.begin(), counter_section.end());
  return out;
}

std::size_t EncodedStream::header_bytes() const {
  std::vector<std::uint8_t> table;
  write_code_lengths(code_lengths, table);
  return 4 + 4 + 4 + 1 + 1 + 1 + 2 * thresholds.size() + 1 + table.size() + 4 + 4;
}

std::size_t EncodedStream::byte_size() const {
  return header_bytes() + value_section.size() + counter_section.size();
}

EncodedStream EncodedStream::parse(std::span<const std::uint8_t> bytes) {
  ByteCursor in(bytes);
  const auto magic = in.take(4, "magic");
  if (std::memcmp(magic.data(), kStreamMagic, 4) != 0) throw CodecError("bad magic", 0);

  EncodedStream s;
  s.width = in.u32("width");
  s.height = in.u32("height");

  const std::uint64_t scheme_offset = in.bit_offset();
  const std::uint8_t scheme_byte = in.u8("scheme_id");
  if (scheme_byte > static_cast<std::uint8_t>(SchemeId::TwoDir2BitHalfRes)) {
    throw CodecError("unknown scheme id " + std::to_string(scheme_byte), scheme_offset);
  }
  s.scheme = static_cast<SchemeId>(scheme_byte);

  const std::uint64_t direction_offset = in.bit_offset();
  const std::uint8_t direction_byte = in.u8("direction");
  if (direction_byte > 1) throw CodecError("unknown direction", direction_offset);
  s.direction = static_cast<Direction>(direction_byte);

  const std::uint64_t thresholds_offset = in.bit_offset();
  const std::uint8_t threshold_count = in.u8("threshold_count");
  for (std::uint8_t i = 0; i < threshold_count; ++i) {
    s.thresholds.push_back(static_cast<std::int16_t>(in.u16("thresholds")));
  }
  QuantScheme scheme;
  try {
    scheme = stream_scheme(s);
  } catch (const InvalidArgument& e) {
    throw CodecError(std::string("invalid scheme parameters: ") + e.what(), thresholds_offset);
  }
  if (!scheme.supports(s.direction)) {
    throw CodecError("scheme does not measure the stream direction", direction_offset);
  }

  const std::uint64_t level_offset = in.bit_offset();
  s.first_level = static_cast<std::int8_t>(in.u8("first_level"));
  if (!scheme.has_level(s.first_level)) {
    throw CodecError("first level outside the scheme alphabet", level_offset);
  }

  const std::uint64_t table_offset = in.bit_offset();
  s.code_lengths = read_code_lengths(bytes, in.pos());
  HuffmanTable::from_lengths(s.code_lengths, table_offset);

  s.value_bits = in.u32("value_bits");
  s.counter_bits = in.u32("counter_bits");
  const auto values = in.take(section_bytes(s.value_bits), "value section");
  s.value_section.assign(values.begin(), values.end());
  const auto counters = in.take(section_bytes(s.counter_bits), "counter section");
  s.counter_section.assign(counters.begin(), counters.end());
  if (in.pos() != bytes.size()) throw CodecError("trailing bytes after stream", in.bit_offset());
  return s;
}

EncodedStream encode(const GradientMap& map) {
  if (map.width() > UINT32_MAX || map.height() > UINT32_MAX) {
    throw InvalidArgument("map dimensions exceed the stream format");
  }
  const QuantScheme& scheme = map.scheme();
  const RunLengthCode rlc = rlc_encode(map);

  EncodedStream s;
  s.width = static_cast<std::uint32_t>(map.width());
  s.height = static_cast<std::uint32_t>(map.height());
  s.scheme = scheme.id();
  s.direction = map.direction();
  for (int t : scheme.thresholds_8bit()) s.thresholds.push_back(static_cast<std::int16_t>(t));
  s.first_level = rlc.first_level;

  const unsigned n = transition_bits(scheme);
  BitWriter values;
  int prev = rlc.first_level;
  for (std::int8_t next : rlc.transitions) {
    values.write(encode_transition(prev, next, scheme), n);
    prev = next;
  }

  const HuffmanTable table = HuffmanTable::build(histogram(rlc.counters));
  BitWriter counters;
  table.encode(rlc.counters, counters);
  s.code_lengths = table.lengths();

  if (values.bit_count() > UINT32_MAX || counters.bit_count() > UINT32_MAX) {
    throw InvalidArgument("stream section exceeds 2^32 bits");
  }
  s.value_bits = static_cast<std::uint32_t>(values.bit_count());
  s.counter_bits = static_cast<std::uint32_t>(counters.bit_count());
  s.value_section = std::move(values).take();
  s.counter_section = std::move(counters).take();
  return s;
}

GradientMap decode(const EncodedStream& s) {
  QuantScheme scheme;
  try {
    scheme = stream_scheme(s);
  } catch (const InvalidArgument& e) {
    throw CodecError(std::string("invalid scheme parameters: ") + e.what(), 0);
  }
  if (!scheme.supports(s.direction)) throw CodecError("scheme does not measure the direction", 0);
  if (!scheme.has_level(s.first_level)) throw CodecError("first level outside alphabet", 0);

  const std::uint64_t value_base = static_cast<std::uint64_t>(s.header_bytes()) * 8;
  const std::uint64_t counter_base = value_base + s.value_section.size() * 8;
  const std::size_t sample_count =
      lattice_sample_count(s.width, s.height, scheme.lattice(s.direction));

  const HuffmanTable table = HuffmanTable::from_lengths(s.code_lengths, 0);
  BitReader counter_in(s.counter_section, s.counter_bits, counter_base);
  BitReader value_in(s.value_section, s.value_bits, value_base);
  const unsigned n = transition_bits(scheme);

  // A corrupt header can claim an enormous map; each counter symbol covers at most 255 samples.
  std::vector<std::int8_t> levels;
  levels.reserve(std::min<std::uint64_t>(sample_count, std::uint64_t{255} * s.counter_bits));
  std::int8_t level = s.first_level;
  std::uint64_t run = 0;
  bool first_run = true;
  while (!counter_in.at_end()) {
    const std::uint64_t segment_offset = counter_in.stream_offset();
    const std::uint8_t segment = table.decode_one(counter_in);
    run += segment;
    if (segment == kCounterContinue) continue;
    if (run == 0) throw CodecError("zero-length run", segment_offset);
    if (!first_run) {
      const std::uint64_t code_offset = value_in.stream_offset();
      const auto code = static_cast<std::uint32_t>(value_in.read(n));
      try {
        level = static_cast<std::int8_t>(decode_transition(level, code, scheme));
      } catch (const InvalidArgument&) {
        throw CodecError("unused transition code " + std::to_string(code), code_offset);
      }
    }
    if (levels.size() + run > sample_count) {
      throw CodecError("run lengths exceed the map size", segment_offset);
    }
    levels.insert(levels.end(), run, level);
    run = 0;
    first_run = false;
  }
  if (run != 0) throw CodecError("counter section ends inside a run", counter_in.stream_offset());
  if (levels.size() != sample_count) {
    throw CodecError("run lengths cover " + std::to_string(levels.size()) + " of " +
                         std::to_string(sample_count) + " samples",
                     counter_in.stream_offset());
  }
  if (!value_in.at_end()) {
    throw CodecError("unconsumed transition codes", value_in.stream_offset());
  }
  return GradientMap(s.width, s.height, s.direction, std::move(scheme), std::move(levels));
}

std::vector<std::uint8_t> encode_bytes(const GradientMap& map) { return encode(map).serialize(); }

GradientMap decode_bytes(std::span<const std::uint8_t> bytes) {
  return decode(EncodedStream::parse(bytes));
}

void write_stream_file(const EncodedStream& stream, const std::filesystem::path& path) {
  const auto bytes = stream.serialize();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

EncodedStream read_stream_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return EncodedStream::parse(bytes);
}

double compression_ratio(const EncodedStream& stream, double baseline_bits_per_pixel) {
  const double raw = static_cast<double>(stream.width) * stream.height * baseline_bits_per_pixel;
  return raw > 0 ? static_cast<double>(stream.total_bits()) / raw : 0.0;
}

}  // namespace gradsense
