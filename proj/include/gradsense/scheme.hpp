#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gradsense {

/// The five gradient acquisition schemes. Values are the on-wire scheme byte.
enum class SchemeId : std::uint8_t {
  OneDir1Bit = 0,         // x only, {0, 1}
  OneDir1p5Bit = 1,       // x only, ternary {-1, 0, 1}
  OneDir2Bit = 2,         // x only, {-2, -1, 0, 1}
  TwoDir1Bit = 3,         // x and y at full resolution, {0, 1} each
  TwoDir2BitHalfRes = 4,  // x and y on complementary checkerboards, {-2, -1, 0, 1}
};

inline constexpr SchemeId kAllSchemes[] = {SchemeId::OneDir1Bit, SchemeId::OneDir1p5Bit,
                                           SchemeId::OneDir2Bit, SchemeId::TwoDir1Bit,
                                           SchemeId::TwoDir2BitHalfRes};

enum class Direction : std::uint8_t { X = 0, Y = 1 };

/// Which pixels of the frame a gradient map samples.
enum class Lattice : std::uint8_t {
  Full,              // every pixel
  EvenCheckerboard,  // (row + col) even
  OddCheckerboard,   // (row + col) odd
};

std::string_view to_string(SchemeId id);
std::string_view to_string(Direction d);

/// Accepts the enum spelling ("OneDir1p5Bit"), the short form ("1d-1.5b") or the
/// scheme letter a-e.
std::optional<SchemeId> parse_scheme_id(std::string_view text);
std::optional<Direction> parse_direction(std::string_view text);

std::size_t lattice_sample_count(std::size_t width, std::size_t height, Lattice lattice);
bool on_lattice(std::size_t row, std::size_t col, Lattice lattice);

/// A gradient quantization scheme: measured directions, comparator thresholds
/// (in 8-bit intensity units) and the output level alphabet.
class QuantScheme {
 public:
  /// Scheme with its default thresholds: 1-bit {1}, 1.5-bit {-4, 4}, 2-bit {-8, -4, 4}.
  static QuantScheme make(SchemeId id);

  /// Overrides the thresholds. The count is fixed by the alphabet; values must be
  /// strictly increasing integers in [-255, 255]. Throws InvalidArgument otherwise.
  static QuantScheme make(SchemeId id, std::vector<int> thresholds_8bit);

  SchemeId id() const noexcept { return id_; }
  std::span<const Direction> directions() const noexcept { return directions_; }
  bool supports(Direction d) const noexcept;
  Lattice lattice(Direction d) const noexcept;

  std::span<const int> thresholds_8bit() const noexcept { return thresholds_; }
  /// Thresholds in normalized intensity units (8-bit value / 255).
  std::vector<double> thresholds() const;
  std::span<const std::int8_t> levels() const noexcept { return levels_; }
  bool has_level(int level) const noexcept;
  /// Index of `level` in the alphabet, or -1.
  int level_index(int level) const noexcept;

  double avg_bits_per_pixel() const noexcept { return avg_bits_; }
  /// Number of directions measured at every pixel (2 for TwoDir1Bit, else 1).
  int directions_per_pixel() const noexcept;

  friend bool operator==(const QuantScheme&, const QuantScheme&) = default;

 private:
  SchemeId id_ = SchemeId::OneDir1p5Bit;
  std::vector<Direction> directions_;
  std::vector<int> thresholds_;
  std::vector<std::int8_t> levels_;
  double avg_bits_ = 0.0;
};

/// Comparator operations per pixel: |thresholds| x directions measured per pixel.
int comparison_count(const QuantScheme& scheme);

/// floor(256 / comparison_count): speedup over an 8-bit single-slope ADC ramp.
int readout_speedup(const QuantScheme& scheme);

inline constexpr int kSingleSlopeComparisons8Bit = 256;

}  // namespace gradsense
