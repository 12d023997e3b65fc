#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gradsense/grid.hpp"

namespace gradsense {

/// Single-channel intensity image with values in [0, 1].
///
/// `source_bit_depth` records the precision of the file the image came from
/// (8, 10, 12 or 16) and is used again when saving. Instances are immutable.
class RasterImage {
 public:
  RasterImage() = default;

  /// Constant image.
  RasterImage(std::size_t width, std::size_t height, double value = 0.0, int source_bit_depth = 8);

  /// Throws InvalidArgument if any value lies outside [0, 1] or is NaN.
  RasterImage(Field pixels, int source_bit_depth = 8);
  RasterImage(std::size_t width, std::size_t height, std::vector<double> data,
              int source_bit_depth = 8);

  /// Clamps every value into [0, 1] instead of rejecting it. NaN becomes 0.
  static RasterImage clamped(Field pixels, int source_bit_depth = 8);

  std::size_t width() const noexcept { return pixels_.width(); }
  std::size_t height() const noexcept { return pixels_.height(); }
  std::size_t size() const noexcept { return pixels_.size(); }
  int source_bit_depth() const noexcept { return bit_depth_; }

  double operator()(std::size_t row, std::size_t col) const noexcept { return pixels_(row, col); }
  std::span<const double> data() const noexcept { return pixels_.values(); }
  const Field& pixels() const noexcept { return pixels_; }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  Field pixels_;
  int bit_depth_ = 8;
};

bool is_supported_bit_depth(int bits) noexcept;

/// Sub-rectangle of an image, in pixels.
struct CropRect {
  std::size_t x = 0;
  std::size_t y = 0;
  std::size_t width = 0;
  std::size_t height = 0;

  friend bool operator==(const CropRect&, const CropRect&) = default;
};

RasterImage crop(const RasterImage& img, const CropRect& rect);

/// Largest centered region whose width is a multiple of `multiple_x` and height
/// a multiple of `multiple_y`.
CropRect center_crop_rect(std::size_t width, std::size_t height, std::size_t multiple_x,
                          std::size_t multiple_y);

/// factor x factor average pooling. Non-divisible inputs are center-cropped to
/// the largest divisible region first; a warning is logged and the crop used is
/// written to `applied_crop` when given.
RasterImage downsample_avg(const RasterImage& img, int factor, CropRect* applied_crop = nullptr);

/// Zero-order-hold (pixel replication) upsampling; the adjoint of average pooling
/// up to the 1/factor^2 scale.
RasterImage upsample_zoh(const RasterImage& img, int factor);
Field upsample_zoh(const Field& field, int factor);

double mean(const RasterImage& img);

}  // namespace gradsense
