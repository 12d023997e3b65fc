#include "gradsense/huffman.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "gradsense/error.hpp"

namespace gradsense {
namespace {

constexpr unsigned kMaxCodeLength = 56;  // BitReader::peek window

struct Node {
  std::uint64_t weight;
  int min_symbol;
  int left = -1;
  int right = -1;
};

}  // namespace

SymbolHistogram histogram(std::span<const std::uint8_t> symbols) {
  SymbolHistogram h{};
  for (std::uint8_t s : symbols) ++h[s];
  return h;
}

HuffmanTable HuffmanTable::build(const SymbolHistogram& hist) {
  std::vector<Node> nodes;
  for (std::size_t s = 0; s < kCounterAlphabet; ++s) {
    if (hist[s] > 0) nodes.push_back({hist[s], static_cast<int>(s)});
  }

  HuffmanTable table;
  if (nodes.size() == 1) {
    table.lengths_[nodes[0].min_symbol] = 1;
  } else if (nodes.size() > 1) {
    const auto heavier = [&nodes](int a, int b) {
      if (nodes[a].weight != nodes[b].weight) return nodes[a].weight > nodes[b].weight;
      return nodes[a].min_symbol > nodes[b].min_symbol;
    };
    std::priority_queue<int, std::vector<int>, decltype(heavier)> queue(heavier);
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i) queue.push(i);
    while (queue.size() > 1) {
      const int a = queue.top();
      queue.pop();
      const int b = queue.top();
      queue.pop();
      nodes.push_back({nodes[a].weight + nodes[b].weight,
                       std::min(nodes[a].min_symbol, nodes[b].min_symbol), a, b});
      queue.push(static_cast<int>(nodes.size()) - 1);
    }
    // Depth-first walk from the root assigns leaf depths.
    std::vector<std::pair<int, unsigned>> stack{{queue.top(), 0u}};
    while (!stack.empty()) {
      const auto [index, depth] = stack.back();
      stack.pop_back();
      const Node& n = nodes[index];
      if (n.left < 0) {
        if (depth > kMaxCodeLength) throw InvalidArgument("Huffman code length limit exceeded");
        table.lengths_[n.min_symbol] = static_cast<std::uint8_t>(depth);
      } else {
        stack.push_back({n.left, depth + 1});
        stack.push_back({n.right, depth + 1});
      }
    }
  }
  table.assign_codes();
  return table;
}

HuffmanTable HuffmanTable::from_lengths(const CodeLengths& lengths, std::uint64_t bit_offset) {
  std::size_t used = 0;
  unsigned max_len = 0;
  for (std::uint8_t l : lengths) {
    if (l == 0) continue;
    ++used;
    max_len = std::max<unsigned>(max_len, l);
  }
  if (max_len > kMaxCodeLength) throw CodecError("Huffman code length too large", bit_offset);
  if (used == 1) {
    if (max_len != 1) throw CodecError("single-symbol Huffman code must be 1 bit", bit_offset);
  } else if (used > 1) {
    // Kraft sum must be exactly 1.
    // Every term is at most 2^55, so stopping once the sum passes 2^max_len avoids overflow.
    const std::uint64_t target = std::uint64_t{1} << max_len;
    std::uint64_t sum = 0;
    for (std::uint8_t l : lengths) {
      if (l > 0) sum += std::uint64_t{1} << (max_len - l);
      if (sum > target) break;
    }
    if (sum != target) {
      throw CodecError("Huffman code lengths do not form a complete prefix code", bit_offset);
    }
  }
  HuffmanTable table;
  table.lengths_ = lengths;
  table.assign_codes();
  return table;
}

void HuffmanTable::assign_codes() {
  max_length_ = 0;
  for (std::uint8_t l : lengths_) max_length_ = std::max<unsigned>(max_length_, l);
  count_per_length_.assign(max_length_ + 1, 0);
  for (std::uint8_t l : lengths_) {
    if (l > 0) ++count_per_length_[l];
  }
  sorted_symbols_.clear();
  for (unsigned len = 1; len <= max_length_; ++len) {
    for (std::size_t s = 0; s < kCounterAlphabet; ++s) {
      if (lengths_[s] == len) sorted_symbols_.push_back(static_cast<std::uint8_t>(s));
    }
  }

  codes_.fill(0);
  std::uint64_t code = 0;
  unsigned prev_len = 0;
  for (std::uint8_t s : sorted_symbols_) {
    const unsigned len = lengths_[s];
    code <<= (len - prev_len);
    codes_[s] = code++;
    prev_len = len;
  }

  fast_.assign(std::size_t{1} << kFastBits, FastEntry{});
  for (std::uint8_t s : sorted_symbols_) {
    const unsigned len = lengths_[s];
    if (len > kFastBits) continue;
    const std::uint64_t first = codes_[s] << (kFastBits - len);
    const std::uint64_t span = std::uint64_t{1} << (kFastBits - len);
    for (std::uint64_t i = 0; i < span; ++i) {
      fast_[first + i] = {s, static_cast<std::uint8_t>(len)};
    }
  }
}

void HuffmanTable::encode(std::span<const std::uint8_t> symbols, BitWriter& out) const {
  for (std::uint8_t s : symbols) {
    const unsigned len = lengths_[s];
    if (len == 0) throw InvalidArgument("symbol " + std::to_string(s) + " has no Huffman code");
    out.write(codes_[s], len);
  }
}

std::uint64_t HuffmanTable::encoded_bits(const SymbolHistogram& hist) const {
  std::uint64_t bits = 0;
  for (std::size_t s = 0; s < kCounterAlphabet; ++s) bits += hist[s] * lengths_[s];
  return bits;
}

std::uint8_t HuffmanTable::decode_one(BitReader& in) const {
  if (empty()) throw CodecError("Huffman decode with an empty code table", in.stream_offset());
  const std::uint64_t start = in.stream_offset();
  const FastEntry& fast = fast_[in.peek(kFastBits)];
  if (fast.length > 0) {
    if (fast.length > in.remaining()) throw CodecError("truncated Huffman code", start);
    in.skip(fast.length);
    return fast.symbol;
  }
  // Canonical walk: at each length, codes [first, first + count) are valid.
  std::uint64_t code = 0;
  std::uint64_t first = 0;
  std::size_t index = 0;
  for (unsigned len = 1; len <= max_length_; ++len) {
    if (in.at_end()) throw CodecError("truncated Huffman code", start);
    code |= in.read(1);
    const std::uint64_t count = count_per_length_[len];
    if (code - first < count) return sorted_symbols_[index + (code - first)];
    index += count;
    first = (first + count) << 1;
    code <<= 1;
  }
  throw CodecError("invalid Huffman code", start);
}

std::vector<std::uint8_t> HuffmanTable::decode_all(BitReader& in) const {
  std::vector<std::uint8_t> out;
  while (!in.at_end()) out.push_back(decode_one(in));
  return out;
}

void write_code_lengths(const CodeLengths& lengths, std::vector<std::uint8_t>& out) {
  std::vector<std::pair<std::uint8_t, std::uint8_t>> pairs;
  for (std::size_t s = 0; s < kCounterAlphabet;) {
    std::size_t run = 1;
    while (s + run < kCounterAlphabet && lengths[s + run] == lengths[s]) ++run;
    pairs.emplace_back(lengths[s], static_cast<std::uint8_t>(run - 1));
    s += run;
  }
  const auto count = static_cast<std::uint16_t>(pairs.size());
  out.push_back(static_cast<std::uint8_t>(count & 0xFF));
  out.push_back(static_cast<std::uint8_t>(count >> 8));
  for (const auto& [len, rep] : pairs) {
    out.push_back(len);
    out.push_back(rep);
  }
}

CodeLengths read_code_lengths(std::span<const std::uint8_t> bytes, std::size_t& pos) {
  const auto fail = [&](const char* what) { throw CodecError(what, pos * 8); };
  if (pos + 2 > bytes.size()) fail("truncated Huffman table");
  const std::size_t count = bytes[pos] | (bytes[pos + 1] << 8);
  pos += 2;
  if (count == 0 || count > kCounterAlphabet) fail("invalid Huffman table pair count");
  CodeLengths lengths{};
  std::size_t symbol = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (pos + 2 > bytes.size()) fail("truncated Huffman table");
    const std::uint8_t len = bytes[pos];
    const std::size_t run = bytes[pos + 1] + std::size_t{1};
    if (symbol + run > kCounterAlphabet) fail("Huffman table covers more than 256 symbols");
    std::fill_n(lengths.begin() + static_cast<std::ptrdiff_t>(symbol), run, len);
    symbol += run;
    pos += 2;
  }
  if (symbol != kCounterAlphabet) fail("Huffman table covers fewer than 256 symbols");
  return lengths;
}

double entropy_bits_per_symbol(const SymbolHistogram& hist) {
  std::uint64_t total = 0;
  for (auto c : hist) total += c;
  if (total == 0) return 0.0;
  double h = 0.0;
  for (auto c : hist) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

}  // namespace gradsense
