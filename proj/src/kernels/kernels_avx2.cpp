// Built with -mavx2 -mfma. Nothing in here may run before dispatch.cpp has
// confirmed CPU support.
#include "kernels_impl.hpp"

#include <immintrin.h>

#include <algorithm>

namespace gradsense::kernels {
namespace {

void diff_x(const double* src, double* dst, std::size_t width, std::size_t height,
            bool periodic) {
  for (std::size_t r = 0; r < height; ++r) {
    const double* s = src + r * width;
    double* d = dst + r * width;
    std::size_t c = 0;
    for (; c + 5 <= width; c += 4) {
      const __m256d here = _mm256_loadu_pd(s + c);
      const __m256d next = _mm256_loadu_pd(s + c + 1);
      _mm256_storeu_pd(d + c, _mm256_sub_pd(next, here));
    }
    for (; c + 1 < width; ++c) d[c] = s[c + 1] - s[c];
    if (width > 0) d[width - 1] = periodic ? s[0] - s[width - 1] : 0.0;
  }
}

void diff_rows(const double* upper, const double* lower, double* dst, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(dst + i, _mm256_sub_pd(_mm256_loadu_pd(lower + i), _mm256_loadu_pd(upper + i)));
  }
  for (; i < n; ++i) dst[i] = lower[i] - upper[i];
}

void quantize(const double* g, std::int8_t* out, std::size_t n, const double* thresholds,
              std::size_t threshold_count, const std::int8_t* levels) {
  std::size_t i = 0;
  alignas(32) std::int64_t idx[4];
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(g + i);
    __m256i count = _mm256_setzero_si256();
    for (std::size_t t = 0; t < threshold_count; ++t) {
      // All-ones lanes are -1 as int64, so subtracting the mask counts passes.
      const __m256d ge = _mm256_cmp_pd(v, _mm256_set1_pd(thresholds[t]), _CMP_GE_OQ);
      count = _mm256_sub_epi64(count, _mm256_castpd_si256(ge));
    }
    _mm256_store_si256(reinterpret_cast<__m256i*>(idx), count);
    out[i] = levels[idx[0]];
    out[i + 1] = levels[idx[1]];
    out[i + 2] = levels[idx[2]];
    out[i + 3] = levels[idx[3]];
  }
  for (; i < n; ++i) {
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
    std::size_t c = 0;
    for (; c + 4 <= w; c += 4) {
      _mm256_storeu_pd(scratch + c,
                       _mm256_add_pd(_mm256_loadu_pd(scratch + c), _mm256_loadu_pd(row + c)));
    }
    for (; c < w; ++c) scratch[c] += row[c];
  }
  // Horizontal block sums stay sequential so results match the scalar table exactly.
  const double area = static_cast<double>(factor * factor);
  for (std::size_t b = 0; b < out_width; ++b) {
    double s = 0.0;
    for (std::size_t c = 0; c < factor; ++c) s += scratch[b * factor + c];
    dst[b] = s / area;
  }
}

double sum_sq_diff(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
    acc0 = _mm256_fmadd_pd(d0, d0, acc0);
    acc1 = _mm256_fmadd_pd(d1, d1, acc1);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, _mm256_add_pd(acc0, acc1));
  double acc = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

void clamp01(double* data, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(data + i);
    _mm256_storeu_pd(data + i, _mm256_min_pd(_mm256_max_pd(v, zero), one));
  }
  for (; i < n; ++i) data[i] = std::clamp(data[i], 0.0, 1.0);
}

// conj(d) * g for two interleaved complex values per register.
inline __m256d conj_mul(__m256d d, __m256d g) {
  const __m256d d_re = _mm256_movedup_pd(d);         // dr0 dr0 dr1 dr1
  const __m256d d_im = _mm256_permute_pd(d, 0xF);    // di0 di0 di1 di1
  const __m256d g_swap = _mm256_permute_pd(g, 0x5);  // gi0 gr0 gi1 gr1
  const __m256d t1 = _mm256_mul_pd(d_re, g);         // dr*gr  dr*gi
  const __m256d t2 = _mm256_mul_pd(d_im, g_swap);    // di*gi  di*gr
  // (t1.re + t2.re, t1.im - t2.im)
  const __m256d sign = _mm256_set_pd(-1.0, 1.0, -1.0, 1.0);
  return _mm256_add_pd(t1, _mm256_mul_pd(t2, sign));
}

void spectral_combine_row(const std::complex<double>* fu, const std::complex<double>* fgx,
                          const std::complex<double>* fgy, const std::complex<double>* dx,
                          std::complex<double> dy, double lambda, double beta,
                          std::complex<double>* out, std::size_t n) {
  const double dy_norm = fgy ? lambda * std::norm(dy) : 0.0;
  const __m256d lam = _mm256_set1_pd(lambda);
  const __m256d base = _mm256_set1_pd(1.0 + beta);
  const __m256d dyv = _mm256_set_pd(dy.imag(), dy.real(), dy.imag(), dy.real());
  const __m256d dy_norm_v = _mm256_set1_pd(dy_norm);

  const auto* pu = reinterpret_cast<const double*>(fu);
  const auto* pg = reinterpret_cast<const double*>(fgx);
  const auto* py = reinterpret_cast<const double*>(fgy);
  const auto* pd = reinterpret_cast<const double*>(dx);
  auto* po = reinterpret_cast<double*>(out);

  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const __m256d d = _mm256_loadu_pd(pd + 2 * k);
    const __m256d g = _mm256_loadu_pd(pg + 2 * k);
    __m256d num = _mm256_add_pd(_mm256_loadu_pd(pu + 2 * k), _mm256_mul_pd(lam, conj_mul(d, g)));
    const __m256d dd = _mm256_mul_pd(d, d);
    __m256d den = _mm256_add_pd(base, _mm256_mul_pd(lam, _mm256_hadd_pd(dd, dd)));
    if (fgy) {
      const __m256d y = _mm256_loadu_pd(py + 2 * k);
      num = _mm256_add_pd(num, _mm256_mul_pd(lam, conj_mul(dyv, y)));
      den = _mm256_add_pd(den, dy_norm_v);
    }
    _mm256_storeu_pd(po + 2 * k, _mm256_div_pd(num, den));
  }
  for (; k < n; ++k) {
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

namespace detail {

const KernelTable& avx2_table() {
  static const KernelTable table{"avx2",      diff_x,  diff_rows, quantize, block_mean_row,
                                 sum_sq_diff, clamp01, spectral_combine_row};
  return table;
}

}  // namespace detail
}  // namespace gradsense::kernels
