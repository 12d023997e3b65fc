#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "gradsense/kernels.hpp"

using namespace gradsense;
using kernels::KernelTable;

namespace {

std::vector<double> randoms(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

const KernelTable* vector_table() {
  const KernelTable* t = kernels::avx2_kernels();
  if (!t) MESSAGE("AVX2 kernels unavailable on this machine; equivalence checks skipped");
  return t;
}

const std::size_t kSizes[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 100, 257};

}  // namespace

TEST_CASE("active table is one of the known variants") {
  const std::string name = kernels::active().name;
  CHECK((name == "scalar" || name == "avx2"));
}

TEST_CASE("diff_x agrees exactly") {
  const KernelTable* v = vector_table();
  if (!v) return;
  const KernelTable& s = kernels::scalar_kernels();
  for (std::size_t w : kSizes) {
    if (w == 0) continue;
    const std::size_t h = 3;
    const auto src = randoms(w * h, w);
    for (bool periodic : {false, true}) {
      std::vector<double> a(w * h), b(w * h);
      s.diff_x(src.data(), a.data(), w, h, periodic);
      v->diff_x(src.data(), b.data(), w, h, periodic);
      CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
    }
  }
}

TEST_CASE("diff_rows, clamp01 and quantize agree exactly") {
  const KernelTable* v = vector_table();
  if (!v) return;
  const KernelTable& s = kernels::scalar_kernels();
  const double thresholds[] = {-8 / 255.0, -4 / 255.0, 4 / 255.0};
  const std::int8_t levels[] = {-2, -1, 0, 1};
  for (std::size_t n : kSizes) {
    const auto up = randoms(n, 10 + n);
    const auto lo = randoms(n, 20 + n);
    std::vector<double> a(n), b(n);
    s.diff_rows(up.data(), lo.data(), a.data(), n);
    v->diff_rows(up.data(), lo.data(), b.data(), n);
    CHECK(a == b);

    auto c1 = randoms(n, 30 + n, -0.5, 1.5);
    auto c2 = c1;
    s.clamp01(c1.data(), n);
    v->clamp01(c2.data(), n);
    CHECK(c1 == c2);

    // Include exact threshold hits.
    auto g = randoms(n, 40 + n, -12 / 255.0, 12 / 255.0);
    for (std::size_t i = 0; i < n; i += 3) g[i] = thresholds[i % 3];
    for (std::size_t count = 1; count <= 3; ++count) {
      std::vector<std::int8_t> qa(n), qb(n);
      s.quantize(g.data(), qa.data(), n, thresholds + (3 - count), count, levels + (3 - count));
      v->quantize(g.data(), qb.data(), n, thresholds + (3 - count), count, levels + (3 - count));
      CHECK(qa == qb);
    }
  }
}

TEST_CASE("block_mean_row agrees exactly") {
  const KernelTable* v = vector_table();
  if (!v) return;
  const KernelTable& s = kernels::scalar_kernels();
  for (std::size_t factor : {1u, 2u, 3u, 4u, 8u}) {
    for (std::size_t out_w : {1u, 3u, 5u, 13u}) {
      const std::size_t stride = out_w * factor + 3;
      const auto rows = randoms(stride * factor, factor * 100 + out_w, 0.0, 1.0);
      std::vector<double> a(out_w), b(out_w), scratch(out_w * factor);
      s.block_mean_row(rows.data(), stride, a.data(), out_w, factor, scratch.data());
      v->block_mean_row(rows.data(), stride, b.data(), out_w, factor, scratch.data());
      CHECK(a == b);
    }
  }
}

TEST_CASE("sum_sq_diff agrees to rounding") {
  const KernelTable* v = vector_table();
  if (!v) return;
  const KernelTable& s = kernels::scalar_kernels();
  for (std::size_t n : kSizes) {
    const auto a = randoms(n, n + 1);
    const auto b = randoms(n, n + 2);
    const double x = s.sum_sq_diff(a.data(), b.data(), n);
    const double y = v->sum_sq_diff(a.data(), b.data(), n);
    CHECK(std::abs(x - y) <= 1e-13 * std::max(1.0, std::abs(x)));
  }
}

TEST_CASE("spectral_combine_row agrees to rounding") {
  const KernelTable* v = vector_table();
  if (!v) return;
  const KernelTable& s = kernels::scalar_kernels();
  using C = std::complex<double>;
  for (std::size_t n : kSizes) {
    const auto re = randoms(4 * n, n + 5);
    const auto im = randoms(4 * n, n + 6);
    std::vector<C> fu(n), fgx(n), fgy(n), dx(n);
    for (std::size_t i = 0; i < n; ++i) {
      fu[i] = {re[i], im[i]};
      fgx[i] = {re[n + i], im[n + i]};
      fgy[i] = {re[2 * n + i], im[2 * n + i]};
      dx[i] = {re[3 * n + i], im[3 * n + i]};
    }
    const C dy{-0.3, 0.7};
    for (bool with_y : {false, true}) {
      std::vector<C> a(n), b(n);
      s.spectral_combine_row(fu.data(), fgx.data(), with_y ? fgy.data() : nullptr, dx.data(), dy,
                             0.8, 1e-3, a.data(), n);
      v->spectral_combine_row(fu.data(), fgx.data(), with_y ? fgy.data() : nullptr, dx.data(), dy,
                              0.8, 1e-3, b.data(), n);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::abs(a[i] - b[i]) <= 1e-13 * std::max(1.0, std::abs(a[i])));
      }
    }
  }
}

TEST_CASE("scalar spectral combine matches the textbook formula") {
  using C = std::complex<double>;
  const C fu{0.5, -0.2}, fgx{0.1, 0.3}, fgy{-0.4, 0.2}, dx{-0.6, 0.8}, dy{-1.0, 0.0};
  const double lambda = 1.3, beta = 0.01;
  const C expected = (fu + lambda * std::conj(dx) * fgx + lambda * std::conj(dy) * fgy) /
                     (1.0 + beta + lambda * std::norm(dx) + lambda * std::norm(dy));
  C out;
  kernels::scalar_kernels().spectral_combine_row(&fu, &fgx, &fgy, &dx, dy, lambda, beta, &out, 1);
  CHECK(std::abs(out - expected) < 1e-15);
}
