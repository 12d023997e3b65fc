#include "gradsense/metrics.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "gradsense/kernels.hpp"

namespace gradsense {
namespace {

void check_pair(const RasterImage& a, const RasterImage& b, std::size_t border) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw InvalidArgument("image dimensions differ: " + std::to_string(a.width()) + "x" +
                          std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                          std::to_string(b.height()));
  }
  if (2 * border >= a.width() || 2 * border >= a.height()) {
    throw InvalidArgument("border crop leaves no pixels");
  }
}

std::vector<double> gaussian_taps(int size, double sigma) {
  std::vector<double> taps(static_cast<std::size_t>(size));
  const double center = (size - 1) / 2.0;
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - center;
    taps[i] = std::exp(-d * d / (2.0 * sigma * sigma));
    sum += taps[i];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

/// Valid-mode separable filtering of a w x h plane.
std::vector<double> filter_valid(const std::vector<double>& src, std::size_t w, std::size_t h,
                                 const std::vector<double>& taps) {
  const std::size_t n = taps.size();
  const std::size_t ow = w - n + 1;
  const std::size_t oh = h - n + 1;
  std::vector<double> horizontal(ow * h);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < ow; ++c) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += taps[k] * src[r * w + c + k];
      horizontal[r * ow + c] = s;
    }
  }
  std::vector<double> out(ow * oh);
  for (std::size_t r = 0; r < oh; ++r) {
    for (std::size_t c = 0; c < ow; ++c) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += taps[k] * horizontal[(r + k) * ow + c];
      out[r * ow + c] = s;
    }
  }
  return out;
}

}  // namespace

double mse(const RasterImage& a, const RasterImage& b, std::size_t border) {
  check_pair(a, b, border);
  const std::size_t w = a.width() - 2 * border;
  const std::size_t h = a.height() - 2 * border;
  const auto& kern = kernels::active();
  double sum = 0.0;
  for (std::size_t r = 0; r < h; ++r) {
    sum += kern.sum_sq_diff(a.pixels().row(border + r).data() + border,
                            b.pixels().row(border + r).data() + border, w);
  }
  return sum / static_cast<double>(w * h);
}

double psnr(const RasterImage& a, const RasterImage& b, std::size_t border) {
  const double e = mse(a, b, border);
  if (e <= 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(1.0 / e));
}

double ssim(const RasterImage& a, const RasterImage& b, const SsimConfig& cfg,
            std::size_t border) {
  check_pair(a, b, border);
  if (cfg.window < 1 || cfg.window % 2 == 0) throw InvalidArgument("SSIM window must be odd");
  const std::size_t w = a.width() - 2 * border;
  const std::size_t h = a.height() - 2 * border;
  const auto win = static_cast<std::size_t>(cfg.window);
  if (w < win || h < win) throw InvalidArgument("image smaller than the SSIM window");

  std::vector<double> x(w * h), y(w * h), xx(w * h), yy(w * h), xy(w * h);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const double va = a(border + r, border + c);
      const double vb = b(border + r, border + c);
      const std::size_t i = r * w + c;
      x[i] = va;
      y[i] = vb;
      xx[i] = va * va;
      yy[i] = vb * vb;
      xy[i] = va * vb;
    }
  }
  const auto taps = gaussian_taps(cfg.window, cfg.sigma);
  const auto mu_x = filter_valid(x, w, h, taps);
  const auto mu_y = filter_valid(y, w, h, taps);
  const auto m_xx = filter_valid(xx, w, h, taps);
  const auto m_yy = filter_valid(yy, w, h, taps);
  const auto m_xy = filter_valid(xy, w, h, taps);

  const double c1 = (cfg.k1 * cfg.data_range) * (cfg.k1 * cfg.data_range);
  const double c2 = (cfg.k2 * cfg.data_range) * (cfg.k2 * cfg.data_range);
  double total = 0.0;
  for (std::size_t i = 0; i < mu_x.size(); ++i) {
    const double mx = mu_x[i], my = mu_y[i];
    const double vx = m_xx[i] - mx * mx;
    const double vy = m_yy[i] - my * my;
    const double cov = m_xy[i] - mx * my;
    total += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) /
             ((mx * mx + my * my + c1) * (vx + vy + c2));
  }
  return total / static_cast<double>(mu_x.size());
}

double tb_ratio(const QuantScheme& scheme) { return scheme.avg_bits_per_pixel() / 8.0; }

double fps_at_link_exact(const QuantScheme& scheme, std::uint64_t width, std::uint64_t height,
                         double link_gbps) {
  if (!(link_gbps > 0.0)) throw InvalidArgument("link bandwidth must be > 0");
  if (width == 0 || height == 0) throw InvalidArgument("frame must be non-empty");
  const double bits_per_frame =
      static_cast<double>(width) * static_cast<double>(height) * scheme.avg_bits_per_pixel();
  return link_gbps * 1e9 / bits_per_frame;
}

int fps_at_link(const QuantScheme& scheme, std::uint64_t width, std::uint64_t height,
                double link_gbps) {
  return static_cast<int>(std::floor(fps_at_link_exact(scheme, width, height, link_gbps)));
}

std::uint64_t implied_frame_pixels(double required_gbps, int bits_per_pixel, double fps) {
  if (!(required_gbps > 0.0) || bits_per_pixel <= 0 || !(fps > 0.0)) {
    throw InvalidArgument("implied_frame_pixels needs positive inputs");
  }
  return static_cast<std::uint64_t>(std::llround(required_gbps * 1e9 / (bits_per_pixel * fps)));
}

}  // namespace gradsense
