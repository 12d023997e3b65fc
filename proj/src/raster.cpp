#include "gradsense/raster.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gradsense/kernels.hpp"
#include "gradsense/log.hpp"

namespace gradsense {
namespace {

void check_bit_depth(int bits) {
  if (!is_supported_bit_depth(bits)) {
    throw InvalidArgument("unsupported source bit depth " + std::to_string(bits));
  }
}

void check_factor(int factor) {
  if (factor <= 0) throw InvalidArgument("resampling factor must be >= 1");
}

}  // namespace

bool is_supported_bit_depth(int bits) noexcept {
  return bits == 8 || bits == 10 || bits == 12 || bits == 16;
}

RasterImage::RasterImage(std::size_t width, std::size_t height, double value, int source_bit_depth)
    : RasterImage(Field(width, height, value), source_bit_depth) {}

RasterImage::RasterImage(Field pixels, int source_bit_depth)
    : pixels_(std::move(pixels)), bit_depth_(source_bit_depth) {
  check_bit_depth(bit_depth_);
  for (double v : pixels_.values()) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("pixel value outside [0, 1]");
  }
}

RasterImage::RasterImage(std::size_t width, std::size_t height, std::vector<double> data,
                         int source_bit_depth)
    : RasterImage(Field(width, height, std::move(data)), source_bit_depth) {}

RasterImage RasterImage::clamped(Field pixels, int source_bit_depth) {
  for (double& v : pixels.values()) {
    if (std::isnan(v)) v = 0.0;
  }
  kernels::active().clamp01(pixels.data(), pixels.size());
  return RasterImage(std::move(pixels), source_bit_depth);
}

RasterImage crop(const RasterImage& img, const CropRect& rect) {
  if (rect.x + rect.width > img.width() || rect.y + rect.height > img.height()) {
    throw InvalidArgument("crop rectangle exceeds image bounds");
  }
  Field out(rect.width, rect.height);
  for (std::size_t r = 0; r < rect.height; ++r) {
    const auto src = img.pixels().row(rect.y + r).subspan(rect.x, rect.width);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return RasterImage(std::move(out), img.source_bit_depth());
}

CropRect center_crop_rect(std::size_t width, std::size_t height, std::size_t multiple_x,
                          std::size_t multiple_y) {
  if (multiple_x == 0 || multiple_y == 0) throw InvalidArgument("crop multiple must be >= 1");
  const std::size_t w = width / multiple_x * multiple_x;
  const std::size_t h = height / multiple_y * multiple_y;
  return {(width - w) / 2, (height - h) / 2, w, h};
}

RasterImage downsample_avg(const RasterImage& img, int factor, CropRect* applied_crop) {
  check_factor(factor);
  const auto k = static_cast<std::size_t>(factor);
  const CropRect rect = center_crop_rect(img.width(), img.height(), k, k);
  if (applied_crop) *applied_crop = rect;

  const bool cropped = rect.width != img.width() || rect.height != img.height();
  RasterImage cropped_img;
  if (cropped) {
    log_warning("downsample_avg: " + std::to_string(img.width()) + "x" +
                std::to_string(img.height()) + " is not divisible by " + std::to_string(k) +
                ", center-cropped to " + std::to_string(rect.width) + "x" +
                std::to_string(rect.height));
    cropped_img = crop(img, rect);
  }
  const RasterImage& src = cropped ? cropped_img : img;

  const std::size_t out_w = src.width() / k;
  const std::size_t out_h = src.height() / k;
  Field out(out_w, out_h);
  std::vector<double> scratch(src.width());
  const auto& kern = kernels::active();
  for (std::size_t r = 0; r < out_h; ++r) {
    kern.block_mean_row(src.pixels().data() + r * k * src.width(), src.width(), out.row(r).data(),
                        out_w, k, scratch.data());
  }
  // Means of [0,1] values stay in [0,1] up to rounding; clamp guards the last ulp.
  return RasterImage::clamped(std::move(out), img.source_bit_depth());
}

Field upsample_zoh(const Field& field, int factor) {
  check_factor(factor);
  const auto k = static_cast<std::size_t>(factor);
  Field out(field.width() * k, field.height() * k);
  for (std::size_t r = 0; r < out.height(); ++r) {
    const auto src = field.row(r / k);
    auto dst = out.row(r);
    for (std::size_t c = 0; c < out.width(); ++c) dst[c] = src[c / k];
  }
  return out;
}

RasterImage upsample_zoh(const RasterImage& img, int factor) {
  return RasterImage(upsample_zoh(img.pixels(), factor), img.source_bit_depth());
}

double mean(const RasterImage& img) {
  if (img.size() == 0) return 0.0;
  double s = 0.0;
  for (double v : img.data()) s += v;
  return s / static_cast<double>(img.size());
}

}  // namespace gradsense
