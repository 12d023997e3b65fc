#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gradsense/error.hpp"
#include "gradsense/metrics.hpp"
#include "test_support.hpp"

using namespace gradsense;

namespace {

// 24x20 pair defined by integer formulas; reference values computed with
// scikit-image structural_similarity(gaussian_weights=True, sigma=1.5,
// use_sample_covariance=False, data_range=1) and peak_signal_noise_ratio.
RasterImage formula_a() {
  std::vector<double> px;
  for (int r = 0; r < 20; ++r) {
    for (int c = 0; c < 24; ++c) px.push_back(((r * 7 + c * 13) % 32) / 31.0);
  }
  return RasterImage(24, 20, px);
}

RasterImage formula_b() {
  const RasterImage a = formula_a();
  std::vector<double> px;
  for (int r = 0; r < 20; ++r) {
    for (int c = 0; c < 24; ++c) {
      px.push_back(std::clamp(a(r, c) + ((r * c) % 5 - 2) / 40.0, 0.0, 1.0));
    }
  }
  return RasterImage(24, 20, px);
}

RasterImage inverted(const RasterImage& img) {
  std::vector<double> px;
  for (double v : img.data()) px.push_back(1.0 - v);
  return RasterImage(img.width(), img.height(), px);
}

}  // namespace

TEST_CASE("SSIM and PSNR match the reference implementation") {
  CHECK(ssim(formula_a(), formula_b()) == doctest::Approx(0.9920562443373585).epsilon(1e-12));
  CHECK(psnr(formula_a(), formula_b()) == doctest::Approx(28.450281393676008).epsilon(1e-12));
  CHECK(ssim(formula_a(), inverted(formula_a())) ==
        doctest::Approx(-0.9819005377083483).epsilon(1e-12));
}

TEST_CASE("identical images hit the caps") {
  const RasterImage a = testing::random_image(40, 30, 1);
  CHECK(psnr(a, a) == kPsnrCap);
  CHECK(ssim(a, a) == doctest::Approx(1.0));
}

TEST_CASE("PSNR of a known constant offset") {
  const RasterImage a(16, 16, 0.5);
  const RasterImage b(16, 16, 0.6);
  CHECK(mse(a, b) == doctest::Approx(0.01));
  CHECK(psnr(a, b) == doctest::Approx(20.0));
}

TEST_CASE("metrics are symmetric and shift invariant") {
  const RasterImage a = testing::random_image(32, 32, 2);
  const RasterImage b = testing::random_image(32, 32, 3);
  CHECK(psnr(a, b) == doctest::Approx(psnr(b, a)));
  CHECK(ssim(a, b) == doctest::Approx(ssim(b, a)));

  std::vector<double> sa, sb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa.push_back(a.data()[i] * 0.5 + 0.25);
    sb.push_back(b.data()[i] * 0.5 + 0.25);
  }
  std::vector<double> ta, tb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ta.push_back(sa[i] + 0.2);
    tb.push_back(sb[i] + 0.2);
  }
  CHECK(psnr(RasterImage(32, 32, sa), RasterImage(32, 32, sb)) ==
        doctest::Approx(psnr(RasterImage(32, 32, ta), RasterImage(32, 32, tb))));
}

TEST_CASE("border crop restricts the compared region") {
  const RasterImage a(20, 20, 0.5);
  std::vector<double> px(400, 0.5);
  px[0] = 0.0;  // differs only in the corner
  const RasterImage b(20, 20, px);
  CHECK(psnr(a, b) < kPsnrCap);
  CHECK(psnr(a, b, 1) == kPsnrCap);
  CHECK_THROWS_AS(psnr(a, b, 10), InvalidArgument);
  CHECK_THROWS_AS(psnr(a, RasterImage(20, 19, 0.5)), InvalidArgument);
  CHECK_THROWS_AS(ssim(RasterImage(10, 10, 0.5), RasterImage(10, 10, 0.5)), InvalidArgument);
}

TEST_CASE("SSIM stays within bounds and drops with distortion") {
  const RasterImage a = testing::pattern_image(64, 64);
  double prev = 1.0;
  for (double sigma : {0.01, 0.03, 0.1}) {
    const RasterImage noisy = add_noise(a, sigma, 7);
    const double s = ssim(a, noisy);
    CHECK(s <= prev);
    CHECK(s >= -1.0);
    prev = s;
  }
}
