#include "gradsense/scheme.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "gradsense/error.hpp"

namespace gradsense {
namespace {

struct SchemeNames {
  SchemeId id;
  std::string_view name;
  std::string_view short_name;
  char letter;
};

constexpr std::array<SchemeNames, 5> kNames{{
    {SchemeId::OneDir1Bit, "OneDir1Bit", "1d-1b", 'a'},
    {SchemeId::OneDir1p5Bit, "OneDir1p5Bit", "1d-1.5b", 'b'},
    {SchemeId::OneDir2Bit, "OneDir2Bit", "1d-2b", 'c'},
    {SchemeId::TwoDir1Bit, "TwoDir1Bit", "2d-1b", 'd'},
    {SchemeId::TwoDir2BitHalfRes, "TwoDir2BitHalfRes", "2d-2b-half", 'e'},
}};

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

}  // namespace

std::string_view to_string(SchemeId id) {
  for (const auto& n : kNames) {
    if (n.id == id) return n.name;
  }
  return "unknown";
}

std::string_view to_string(Direction d) { return d == Direction::X ? "x" : "y"; }

std::optional<SchemeId> parse_scheme_id(std::string_view text) {
  for (const auto& n : kNames) {
    if (iequals(text, n.name) || iequals(text, n.short_name) ||
        (text.size() == 1 && std::tolower(static_cast<unsigned char>(text[0])) == n.letter)) {
      return n.id;
    }
  }
  return std::nullopt;
}

std::optional<Direction> parse_direction(std::string_view text) {
  if (iequals(text, "x")) return Direction::X;
  if (iequals(text, "y")) return Direction::Y;
  return std::nullopt;
}

bool on_lattice(std::size_t row, std::size_t col, Lattice lattice) {
  switch (lattice) {
    case Lattice::Full: return true;
    case Lattice::EvenCheckerboard: return (row + col) % 2 == 0;
    case Lattice::OddCheckerboard: return (row + col) % 2 == 1;
  }
  return false;
}

std::size_t lattice_sample_count(std::size_t width, std::size_t height, Lattice lattice) {
  if (lattice == Lattice::Full) return width * height;
  const std::size_t even_rows = (height + 1) / 2;
  const std::size_t odd_rows = height / 2;
  const std::size_t wide = (width + 1) / 2;  // even-parity columns in an even row
  const std::size_t narrow = width / 2;
  const std::size_t even = even_rows * wide + odd_rows * narrow;
  return lattice == Lattice::EvenCheckerboard ? even : width * height - even;
}

QuantScheme QuantScheme::make(SchemeId id) {
  switch (id) {
    case SchemeId::OneDir1Bit:
    case SchemeId::TwoDir1Bit: return make(id, {1});
    case SchemeId::OneDir1p5Bit: return make(id, {-4, 4});
    case SchemeId::OneDir2Bit:
    case SchemeId::TwoDir2BitHalfRes: return make(id, {-8, -4, 4});
  }
  throw InvalidArgument("unknown scheme id");
}

QuantScheme QuantScheme::make(SchemeId id, std::vector<int> thresholds_8bit) {
  QuantScheme s;
  s.id_ = id;
  switch (id) {
    case SchemeId::OneDir1Bit:
      s.directions_ = {Direction::X};
      s.levels_ = {0, 1};
      s.avg_bits_ = 1.0;
      break;
    case SchemeId::OneDir1p5Bit:
      s.directions_ = {Direction::X};
      s.levels_ = {-1, 0, 1};
      s.avg_bits_ = 1.5;
      break;
    case SchemeId::OneDir2Bit:
      s.directions_ = {Direction::X};
      s.levels_ = {-2, -1, 0, 1};
      s.avg_bits_ = 2.0;
      break;
    case SchemeId::TwoDir1Bit:
      s.directions_ = {Direction::X, Direction::Y};
      s.levels_ = {0, 1};
      s.avg_bits_ = 2.0;
      break;
    case SchemeId::TwoDir2BitHalfRes:
      s.directions_ = {Direction::X, Direction::Y};
      s.levels_ = {-2, -1, 0, 1};
      s.avg_bits_ = 2.0;
      break;
    default: throw InvalidArgument("unknown scheme id");
  }
  if (thresholds_8bit.size() + 1 != s.levels_.size()) {
    throw InvalidArgument(std::string(to_string(id)) + " needs " +
                          std::to_string(s.levels_.size() - 1) + " thresholds");
  }
  for (std::size_t i = 0; i < thresholds_8bit.size(); ++i) {
    if (thresholds_8bit[i] < -255 || thresholds_8bit[i] > 255) {
      throw InvalidArgument("threshold outside [-255, 255]");
    }
    if (i > 0 && thresholds_8bit[i] <= thresholds_8bit[i - 1]) {
      throw InvalidArgument("thresholds must be strictly increasing");
    }
  }
  s.thresholds_ = std::move(thresholds_8bit);
  return s;
}

bool QuantScheme::supports(Direction d) const noexcept {
  return std::find(directions_.begin(), directions_.end(), d) != directions_.end();
}

Lattice QuantScheme::lattice(Direction d) const noexcept {
  if (id_ != SchemeId::TwoDir2BitHalfRes) return Lattice::Full;
  return d == Direction::X ? Lattice::EvenCheckerboard : Lattice::OddCheckerboard;
}

std::vector<double> QuantScheme::thresholds() const {
  std::vector<double> out;
  out.reserve(thresholds_.size());
  for (int t : thresholds_) out.push_back(t / 255.0);
  return out;
}

bool QuantScheme::has_level(int level) const noexcept { return level_index(level) >= 0; }

int QuantScheme::level_index(int level) const noexcept {
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (levels_[i] == level) return static_cast<int>(i);
  }
  return -1;
}

int QuantScheme::directions_per_pixel() const noexcept {
  return id_ == SchemeId::TwoDir1Bit ? 2 : 1;
}

int comparison_count(const QuantScheme& scheme) {
  return static_cast<int>(scheme.thresholds_8bit().size()) * scheme.directions_per_pixel();
}

int readout_speedup(const QuantScheme& scheme) {
  return kSingleSlopeComparisons8Bit / comparison_count(scheme);
}

}  // namespace gradsense
