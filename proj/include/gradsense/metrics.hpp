#pragma once

#include <cstddef>
#include <cstdint>

#include "gradsense/raster.hpp"
#include "gradsense/scheme.hpp"

namespace gradsense {

/// Reported for identical images (and as the upper bound of every PSNR value).
inline constexpr double kPsnrCap = 99.0;

/// Mean squared error over the image minus a `border` pixel frame.
double mse(const RasterImage& a, const RasterImage& b, std::size_t border = 0);

/// 10 log10(1 / MSE) with peak 1.0, capped at kPsnrCap. Throws InvalidArgument
/// on a dimension mismatch or when the border crop leaves nothing.
double psnr(const RasterImage& a, const RasterImage& b, std::size_t border = 0);

/// Single-scale SSIM settings. Defaults are the common Gaussian 11x11, sigma 1.5
/// window with K1 = 0.01, K2 = 0.03 on a unit data range.
struct SsimConfig {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double data_range = 1.0;
};

/// Mean local SSIM over all window positions fully inside the (border-cropped)
/// image. The result lies in [-1, 1]. Throws InvalidArgument when the image is
/// smaller than the window.
double ssim(const RasterImage& a, const RasterImage& b, const SsimConfig& cfg = {},
            std::size_t border = 0);

/// Raw transmitted bits per pixel relative to an 8-bit baseline.
double tb_ratio(const QuantScheme& scheme);

/// Frames per second a link of `link_gbps` sustains for raw low-bit frames of
/// width x height pixels. Throws InvalidArgument for link_gbps <= 0 or an empty frame.
double fps_at_link_exact(const QuantScheme& scheme, std::uint64_t width, std::uint64_t height,
                         double link_gbps);

/// fps_at_link_exact floored to whole frames.
int fps_at_link(const QuantScheme& scheme, std::uint64_t width, std::uint64_t height,
                double link_gbps);

/// Frame size implied by a link requirement: bits/s / (bits per pixel x fps).
/// With the defaults, 240 Gbit/s for 8-bit video at 30 fps gives 10^9 pixels.
std::uint64_t implied_frame_pixels(double required_gbps = 240.0, int bits_per_pixel = 8,
                                   double fps = 30.0);

inline constexpr double kMipiCsi2Gbps = 41.4;

}  // namespace gradsense
