#include "gradsense/rlc.hpp"

#include <bit>
#include <string>

namespace gradsense {

void append_counter_segments(std::uint64_t run_length, std::vector<std::uint8_t>& out) {
  if (run_length == 0) throw InvalidArgument("run length must be >= 1");
  while (run_length >= kCounterContinue) {
    out.push_back(kCounterContinue);
    run_length -= kCounterContinue;
  }
  out.push_back(static_cast<std::uint8_t>(run_length));
}

RunLengthCode rlc_encode(std::span<const std::int8_t> levels, const QuantScheme& scheme) {
  for (std::int8_t l : levels) {
    if (!scheme.has_level(l)) {
      throw InvalidArgument("level " + std::to_string(l) + " outside the " +
                            std::string(to_string(scheme.id())) + " alphabet");
    }
  }
  RunLengthCode code;
  if (levels.empty()) {
    code.first_level = scheme.levels().front();
    return code;
  }
  code.first_level = levels.front();
  std::uint64_t run = 1;
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (levels[i] == levels[i - 1]) {
      ++run;
      continue;
    }
    append_counter_segments(run, code.counters);
    code.transitions.push_back(levels[i]);
    run = 1;
  }
  append_counter_segments(run, code.counters);
  return code;
}

RunLengthCode rlc_encode(const GradientMap& map) { return rlc_encode(map.samples(), map.scheme()); }

std::vector<std::int8_t> rlc_decode(const RunLengthCode& code, std::size_t sample_count) {
  std::vector<std::int8_t> out;
  out.reserve(sample_count);
  std::int8_t level = code.first_level;
  std::size_t next_transition = 0;
  std::uint64_t run = 0;
  bool open = false;
  for (std::uint8_t segment : code.counters) {
    run += segment;
    open = true;
    if (segment == kCounterContinue) continue;
    if (run == 0) throw InvalidArgument("zero-length run");
    if (out.size() + run > sample_count) throw InvalidArgument("runs exceed the sample count");
    out.insert(out.end(), run, level);
    run = 0;
    open = false;
    if (out.size() < sample_count) {
      if (next_transition >= code.transitions.size()) {
        throw InvalidArgument("missing transition value");
      }
      level = code.transitions[next_transition++];
    }
  }
  if (open) throw InvalidArgument("counter sequence ends inside a run");
  if (out.size() != sample_count) throw InvalidArgument("runs do not cover the sample count");
  if (next_transition != code.transitions.size()) throw InvalidArgument("unused transition values");
  return out;
}

unsigned transition_bits(const QuantScheme& scheme) {
  const std::size_t candidates = scheme.levels().size() - 1;
  return candidates <= 1 ? 0u : static_cast<unsigned>(std::bit_width(candidates - 1));
}

std::uint32_t encode_transition(int prev, int next, const QuantScheme& scheme) {
  const int prev_index = scheme.level_index(prev);
  const int next_index = scheme.level_index(next);
  if (prev_index < 0 || next_index < 0) throw InvalidArgument("transition level outside alphabet");
  if (prev == next) throw InvalidArgument("not a transition: next level equals previous level");
  // Dropping prev from the ascending alphabet shifts every later level down by one.
  return static_cast<std::uint32_t>(next_index > prev_index ? next_index - 1 : next_index);
}

int decode_transition(int prev, std::uint32_t code, const QuantScheme& scheme) {
  const int prev_index = scheme.level_index(prev);
  if (prev_index < 0) throw InvalidArgument("transition level outside alphabet");
  const auto candidates = static_cast<std::uint32_t>(scheme.levels().size() - 1);
  if (code >= candidates) throw InvalidArgument("unused transition code");
  const auto index = static_cast<int>(code) >= prev_index ? code + 1 : code;
  return scheme.levels()[index];
}

}  // namespace gradsense
