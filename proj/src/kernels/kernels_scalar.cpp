#include "kernels_impl.hpp"

#include <algorithm>

namespace gradsense::kernels {
namespace {

void diff_x(const double* src, double* dst, std::size_t width, std::size_t height,
            bool periodic) {
  for (std::size_t r = 0; r < height; ++r) {
    const double* s = src + r * width;
    double* d = dst + r * width;
    for (std::size_t c = 0; c + 1 < width; ++c) d[c] = s[c + 1] - s[c];
    if (width > 0) d[width - 1] = periodic ? s[0] - s[width - 1] : 0.0;
  }
}

void diff_rows(const double* upper, const double* lower, double* dst, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = lower[i] - upper[i];
}

void quantize(const double* g, std::int8_t* out, std::size_t n, const double* thresholds,
              std::size_t threshold_count, const std::int8_t* levels) {
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t k = 0;
    for (std::size_t t = 0; t < threshold_count; ++t) k += g[i] >= thresholds[t] ? 1 : 0;
    out[i] = levels[k];
  }
}

void block_mean_row(const double* rows, std::size_t stride, double* dst, std::size_t out_width,
                    std::size_t factor, double* scratch) {
  const std::size_t w = out_width * factor;
  std::copy(rows, rows + w, scratch);
  for (std::size_t r = 1; r < factor; ++r) {
    const double* row = rows + r * stride;
    for (std::size_t c = 0; c < w; ++c) scratch[c] += row[c];
  }
  const double area = static_cast<double>(factor * factor);
  for (std::size_t b = 0; b < out_width; ++b) {
    double s = 0.0;
    for (std::size_t c = 0; c < factor; ++c) s += scratch[b * factor + c];
    dst[b] = s / area;
  }
}

double sum_sq_diff(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

void clamp01(double* data, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) data[i] = std::clamp(data[i], 0.0, 1.0);
}

void spectral_combine_row(const std::complex<double>* fu, const std::complex<double>* fgx,
                          const std::complex<double>* fgy, const std::complex<double>* dx,
                          std::complex<double> dy, double lambda, double beta,
                          std::complex<double>* out, std::size_t n) {
  const double dy_norm = fgy ? lambda * std::norm(dy) : 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    // conj(d) * g, written out so the AVX2 variant can mirror it.
    const double dr = dx[k].real(), di = dx[k].imag();
    const double gr = fgx[k].real(), gi = fgx[k].imag();
    double re = fu[k].real() + lambda * (dr * gr + di * gi);
    double im = fu[k].imag() + lambda * (dr * gi - di * gr);
    double den = 1.0 + beta + lambda * (dr * dr + di * di);
    if (fgy) {
      const double yr = fgy[k].real(), yi = fgy[k].imag();
      re += lambda * (dy.real() * yr + dy.imag() * yi);
      im += lambda * (dy.real() * yi - dy.imag() * yr);
      den += dy_norm;
    }
    out[k] = {re / den, im / den};
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", diff_x,  diff_rows, quantize, block_mean_row,
                                 sum_sq_diff, clamp01, spectral_combine_row};
  return table;
}

}  // namespace gradsense::kernels
