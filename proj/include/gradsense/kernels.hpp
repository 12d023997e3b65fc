#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference implementation
// and, on x86-64, an AVX2 variant; the active table is chosen once at startup
// from CPUID and can be forced with GRADSENSE_KERNELS=scalar|avx2.
//
// Variants must agree bit-for-bit except sum_sq_diff and spectral_combine_row,
// whose floating-point association differs (relative agreement ~1e-13).

#include <complex>
#include <cstddef>
#include <cstdint>

namespace gradsense::kernels {

struct KernelTable {
  const char* name;

  // Forward difference along each row: dst[r][c] = src[r][c+1] - src[r][c].
  // The last column is 0, or src[r][0] - src[r][w-1] when periodic.
  void (*diff_x)(const double* src, double* dst, std::size_t width, std::size_t height,
                 bool periodic);

  // dst[i] = lower[i] - upper[i]; one row of a vertical forward difference.
  void (*diff_rows)(const double* upper, const double* lower, double* dst, std::size_t n);

  // out[i] = levels[k], k = number of thresholds t with g[i] >= t.
  // Thresholds must be sorted ascending.
  void (*quantize)(const double* g, std::int8_t* out, std::size_t n, const double* thresholds,
                   std::size_t threshold_count, const std::int8_t* levels);

  // One output row of factor x factor average pooling. `rows` points at the first
  // of `factor` input rows separated by `stride`; `scratch` holds out_width*factor values.
  void (*block_mean_row)(const double* rows, std::size_t stride, double* dst,
                         std::size_t out_width, std::size_t factor, double* scratch);

  double (*sum_sq_diff)(const double* a, const double* b, std::size_t n);

  void (*clamp01)(double* data, std::size_t n);

  // One row of the regularized Fourier-domain solve:
  //   out[k] = (fu[k] + lambda*conj(dx[k])*fgx[k] + lambda*conj(dy)*fgy[k])
  //            / (1 + beta + lambda*|dx[k]|^2 + lambda*|dy|^2)
  // fgy may be null, in which case the y terms are dropped entirely.
  void (*spectral_combine_row)(const std::complex<double>* fu, const std::complex<double>* fgx,
                               const std::complex<double>* fgy, const std::complex<double>* dx,
                               std::complex<double> dy, double lambda, double beta,
                               std::complex<double>* out, std::size_t n);
};

const KernelTable& scalar_kernels();

// nullptr when the AVX2 variants were not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

// Table used by the rest of the library.
const KernelTable& active();

}  // namespace gradsense::kernels
