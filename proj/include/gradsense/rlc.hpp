#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gradsense/scheme.hpp"
#include "gradsense/sensor.hpp"

namespace gradsense {

/// Counter value marking "255 more, the run continues".
inline constexpr std::uint8_t kCounterContinue = 255;

/// Run-length form of a level sequence. Every run but the first is introduced
/// by a transition; every run is one or more counter segments where all but
/// the last equal 255 and the last is < 255 (so a run of exactly 255 is [255, 0]).
struct RunLengthCode {
  std::int8_t first_level = 0;
  std::vector<std::int8_t> transitions;  // level of runs 2..n
  std::vector<std::uint8_t> counters;

  friend bool operator==(const RunLengthCode&, const RunLengthCode&) = default;
};

/// Splits `run_length` (>= 1) into counter segments and appends them.
void append_counter_segments(std::uint64_t run_length, std::vector<std::uint8_t>& out);

/// Row-major run-length coding of the map's samples.
RunLengthCode rlc_encode(const GradientMap& map);

/// Same over raw levels; throws InvalidArgument for a level outside the alphabet.
RunLengthCode rlc_encode(std::span<const std::int8_t> levels, const QuantScheme& scheme);

/// Inverse of rlc_encode. Throws InvalidArgument if the counters are malformed
/// or do not add up to `sample_count`.
std::vector<std::int8_t> rlc_decode(const RunLengthCode& code, std::size_t sample_count);

/// Bits per transition: ceil(log2(|alphabet| - 1)). 0 for a two-level alphabet.
unsigned transition_bits(const QuantScheme& scheme);

/// Index of `next` among the alphabet levels other than `prev`, ascending.
/// Throws InvalidArgument when next == prev or either is outside the alphabet.
std::uint32_t encode_transition(int prev, int next, const QuantScheme& scheme);

/// Inverse of encode_transition. Throws InvalidArgument for an unused index.
int decode_transition(int prev, std::uint32_t code, const QuantScheme& scheme);

}  // namespace gradsense
