#pragma once

#include <cstdint>
#include <vector>

#include "gradsense/grid.hpp"
#include "gradsense/raster.hpp"
#include "gradsense/scheme.hpp"

namespace gradsense {

/// Quantized gradient levels for one direction of one frame.
///
/// `width`/`height` are the frame dimensions. Only positions on the scheme's
/// lattice for `direction` are stored, in raster order; for full-resolution
/// schemes that is every pixel.
class GradientMap {
 public:
  /// Throws InvalidArgument if the scheme does not measure `direction`, the sample
  /// count does not match the lattice, or a level is outside the alphabet.
  GradientMap(std::size_t width, std::size_t height, Direction direction, QuantScheme scheme,
              std::vector<std::int8_t> samples);

  /// Extracts the lattice samples from a full-frame level grid.
  static GradientMap from_dense(const Grid<std::int8_t>& levels, Direction direction,
                                const QuantScheme& scheme);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  Direction direction() const noexcept { return direction_; }
  const QuantScheme& scheme() const noexcept { return scheme_; }
  Lattice lattice() const noexcept { return scheme_.lattice(direction_); }
  std::span<const std::int8_t> samples() const noexcept { return samples_; }

  /// Full-frame view; unsampled positions hold `fill`.
  Grid<std::int8_t> to_dense(std::int8_t fill = 0) const;

  friend bool operator==(const GradientMap&, const GradientMap&) = default;

 private:
  std::size_t width_;
  std::size_t height_;
  Direction direction_;
  QuantScheme scheme_;
  std::vector<std::int8_t> samples_;
};

enum class Boundary {
  Zero,      // last column/row difference is 0 (sensor behaviour)
  Periodic,  // wraps around (matches the Fourier solver's operator)
};

/// Forward difference I(x+1,y) - I(x,y) (or along y). Throws InvalidArgument when
/// the differenced dimension is smaller than 2.
Field gradient_exact(const RasterImage& img, Direction direction,
                     Boundary boundary = Boundary::Zero);

/// Level for a single gradient value g (normalized units): the alphabet entry at
/// index #{t : g >= t}. A value equal to a threshold goes to the upper interval.
std::int8_t quantize_value(double g, const QuantScheme& scheme);

/// Quantizes the lattice positions of `field` for `direction`.
GradientMap quantize(const Field& field, const QuantScheme& scheme, Direction direction);

/// i.i.d. N(0, sigma^2) samples from a seeded 64-bit Mersenne Twister.
std::vector<double> gaussian_noise(std::size_t count, double sigma, std::uint64_t seed);

/// Adds Gaussian noise of std `sigma` (normalized units) and clamps to [0, 1].
/// sigma == 0 returns the input unchanged. Throws InvalidArgument for sigma < 0.
RasterImage add_noise(const RasterImage& img, double sigma, std::uint64_t seed);

struct Acquisition {
  std::vector<GradientMap> maps;  // one per scheme direction, in scheme order
  RasterImage lri;
};

/// Simulates one exposure: noise is added to `hr` before differencing, the LRI is
/// average-pooled from the clean image. Dimensions must divide by `lri_factor`
/// (and by 2 for TwoDir2BitHalfRes); otherwise InvalidArgument.
Acquisition simulate_acquisition(const RasterImage& hr, const QuantScheme& scheme, int lri_factor,
                                 double noise_sigma, std::uint64_t seed);

/// Independent per-frame seeds from a base seed (splitmix64 of base ^ index).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace gradsense
