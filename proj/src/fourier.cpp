#include "gradsense/fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "gradsense/kernels.hpp"

namespace gradsense {
namespace {

// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex g_plan_mutex;

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const noexcept {
    std::lock_guard lock(g_plan_mutex);
    fftw_destroy_plan(p);
  }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

using Spectrum = std::vector<std::complex<double>>;

/// Real-to-half-complex transform of a height x width field: height x (width/2+1) bins.
Spectrum forward(const Field& f) {
  const int h = static_cast<int>(f.height());
  const int w = static_cast<int>(f.width());
  std::vector<double> in(f.values().begin(), f.values().end());
  Spectrum out(static_cast<std::size_t>(h) * (w / 2 + 1));
  Plan plan;
  {
    std::lock_guard lock(g_plan_mutex);
    plan.reset(fftw_plan_dft_r2c_2d(h, w, in.data(), reinterpret_cast<fftw_complex*>(out.data()),
                                    FFTW_ESTIMATE));
  }
  fftw_execute(plan.get());
  return out;
}

Field inverse(Spectrum spectrum, std::size_t width, std::size_t height) {
  const int h = static_cast<int>(height);
  const int w = static_cast<int>(width);
  Field out(width, height);
  Plan plan;
  {
    std::lock_guard lock(g_plan_mutex);
    plan.reset(fftw_plan_dft_c2r_2d(h, w, reinterpret_cast<fftw_complex*>(spectrum.data()),
                                    out.data(), FFTW_ESTIMATE));
  }
  fftw_execute(plan.get());
  const double scale = 1.0 / (static_cast<double>(width) * static_cast<double>(height));
  for (double& v : out.values()) v *= scale;
  return out;
}

/// Frequency response of the periodic forward difference: exp(2*pi*i*k/n) - 1.
std::complex<double> difference_response(std::size_t k, std::size_t n) {
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
  return {std::cos(angle) - 1.0, std::sin(angle)};
}

void check_shapes(const RasterImage& lri, const Field& gx, const ReconConfig& cfg,
                  const Field* gy) {
  cfg.validate();
  const auto k = static_cast<std::size_t>(cfg.upsample_factor);
  if (gx.width() != lri.width() * k || gx.height() != lri.height() * k) {
    throw InvalidArgument("gradient field " + std::to_string(gx.width()) + "x" +
                          std::to_string(gx.height()) + " does not match LRI " +
                          std::to_string(lri.width()) + "x" + std::to_string(lri.height()) +
                          " times factor " + std::to_string(k));
  }
  if (gy && (gy->width() != gx.width() || gy->height() != gx.height())) {
    throw InvalidArgument("y gradient field does not match x gradient field");
  }
  if (gx.empty()) throw InvalidArgument("empty reconstruction target");
}

}  // namespace

void ReconConfig::validate() const {
  if (!(beta > 0.0)) throw InvalidArgument("beta must be > 0");
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be >= 0");
  if (upsample_factor < 1) throw InvalidArgument("upsample factor must be >= 1");
  if (!(saturation_8bit > 0.0)) throw InvalidArgument("dequantization saturation must be > 0");
}

DequantTable DequantTable::make(const QuantScheme& scheme, const ReconConfig& cfg) {
  const auto thresholds = scheme.thresholds_8bit();
  const double sat = cfg.saturation_8bit;
  for (int t : thresholds) {
    if (std::abs(t) >= sat) {
      throw InvalidArgument("dequantization saturation must exceed every |threshold|");
    }
  }
  DequantTable table;
  const auto levels = scheme.levels();
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double lo = i == 0 ? -sat : thresholds[i - 1];
    const double hi = i + 1 == levels.size() ? sat : thresholds[i];
    const bool holds_zero = lo <= 0.0 && 0.0 < hi;
    const double value_8bit = holds_zero ? 0.0 : 0.5 * (lo + hi);
    table.values_[levels[i]] = value_8bit / 255.0;
  }
  for (const auto& [level, value] : cfg.dequant_overrides) {
    if (!scheme.has_level(level)) {
      throw InvalidArgument("dequant override for level " + std::to_string(level) +
                            " outside the alphabet");
    }
    table.values_[level] = value / 255.0;
  }
  double prev = -std::numeric_limits<double>::infinity();
  for (const auto& [level, value] : table.values_) {
    if (value < prev) throw InvalidArgument("dequantization mapping must be monotone");
    prev = value;
  }
  return table;
}

double DequantTable::value(int level) const {
  const auto it = values_.find(level);
  if (it == values_.end()) {
    throw InvalidArgument("no dequantization entry for level " + std::to_string(level));
  }
  return it->second;
}

Field dequantize(const GradientMap& map, const ReconConfig& cfg) {
  const DequantTable table = DequantTable::make(map.scheme(), cfg);
  const Lattice lat = map.lattice();
  const std::size_t w = map.width();
  const std::size_t h = map.height();
  Field out(w, h);
  std::size_t i = 0;
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      if (on_lattice(r, c, lat)) out(r, c) = table.value(map.samples()[i++]);
    }
  }
  if (lat == Lattice::Full) return out;

  // Each 4-neighbour of an off-lattice position lies on the lattice.
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      if (on_lattice(r, c, lat)) continue;
      double sum = 0.0;
      int n = 0;
      if (r > 0) sum += out(r - 1, c), ++n;
      if (r + 1 < h) sum += out(r + 1, c), ++n;
      if (c > 0) sum += out(r, c - 1), ++n;
      if (c + 1 < w) sum += out(r, c + 1), ++n;
      out(r, c) = n > 0 ? sum / n : 0.0;
    }
  }
  return out;
}

Field reconstruct_unclamped(const RasterImage& lri, const Field& gx, const ReconConfig& cfg,
                            const Field* gy) {
  check_shapes(lri, gx, cfg, gy);
  const Field upsampled = upsample_zoh(lri.pixels(), cfg.upsample_factor);
  const std::size_t w = gx.width();
  const std::size_t h = gx.height();
  const std::size_t bins = w / 2 + 1;

  const Spectrum fu = forward(upsampled);
  const Spectrum fgx = forward(gx);
  Spectrum fgy;
  if (gy) fgy = forward(*gy);

  Spectrum dx(bins);
  for (std::size_t k = 0; k < bins; ++k) dx[k] = difference_response(k, w);

  Spectrum solution(h * bins);
  const auto& kern = kernels::active();
  for (std::size_t ky = 0; ky < h; ++ky) {
    const std::size_t offset = ky * bins;
    kern.spectral_combine_row(fu.data() + offset, fgx.data() + offset,
                              gy ? fgy.data() + offset : nullptr, dx.data(),
                              difference_response(ky, h), cfg.lambda, cfg.beta,
                              solution.data() + offset, bins);
  }
  return inverse(std::move(solution), w, h);
}

RasterImage reconstruct_closed_form(const RasterImage& lri, const Field& gx,
                                    const ReconConfig& cfg, const Field* gy) {
  return RasterImage::clamped(reconstruct_unclamped(lri, gx, cfg, gy), lri.source_bit_depth());
}

Field periodic_diff(const Field& f, Direction d) {
  const std::size_t w = f.width();
  const std::size_t h = f.height();
  Field out(w, h);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      out(r, c) = d == Direction::X ? f(r, (c + 1) % w) - f(r, c) : f((r + 1) % h, c) - f(r, c);
    }
  }
  return out;
}

Field periodic_diff_adjoint(const Field& f, Direction d) {
  const std::size_t w = f.width();
  const std::size_t h = f.height();
  Field out(w, h);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      out(r, c) = d == Direction::X ? f(r, (c + w - 1) % w) - f(r, c)
                                    : f((r + h - 1) % h, c) - f(r, c);
    }
  }
  return out;
}

double residual_check(const Field& image, const RasterImage& lri, const Field& gx,
                      const ReconConfig& cfg, const Field* gy) {
  check_shapes(lri, gx, cfg, gy);
  if (image.width() != gx.width() || image.height() != gx.height()) {
    throw InvalidArgument("reconstruction does not match the gradient field");
  }
  const Field upsampled = upsample_zoh(lri.pixels(), cfg.upsample_factor);
  const Field dtdx = periodic_diff_adjoint(periodic_diff(image, Direction::X), Direction::X);
  const Field dtgx = periodic_diff_adjoint(gx, Direction::X);
  Field dtdy, dtgy;
  if (gy) {
    dtdy = periodic_diff_adjoint(periodic_diff(image, Direction::Y), Direction::Y);
    dtgy = periodic_diff_adjoint(*gy, Direction::Y);
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < image.size(); ++i) {
    double r = (1.0 + cfg.beta) * image.values()[i] + cfg.lambda * dtdx.values()[i] -
               upsampled.values()[i] - cfg.lambda * dtgx.values()[i];
    if (gy) r += cfg.lambda * (dtdy.values()[i] - dtgy.values()[i]);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

double objective(const Field& image, const RasterImage& lri, const Field& gx,
                 const ReconConfig& cfg, const Field* gy) {
  check_shapes(lri, gx, cfg, gy);
  const Field upsampled = upsample_zoh(lri.pixels(), cfg.upsample_factor);
  const Field dx = periodic_diff(image, Direction::X);
  Field dy;
  if (gy) dy = periodic_diff(image, Direction::Y);
  double data = 0.0, grad = 0.0, ridge = 0.0;
  for (std::size_t i = 0; i < image.size(); ++i) {
    const double v = image.values()[i];
    data += (upsampled.values()[i] - v) * (upsampled.values()[i] - v);
    const double ex = dx.values()[i] - gx.values()[i];
    grad += ex * ex;
    if (gy) {
      const double ey = dy.values()[i] - gy->values()[i];
      grad += ey * ey;
    }
    ridge += v * v;
  }
  return data + cfg.lambda * grad + cfg.beta * ridge;
}

}  // namespace gradsense
