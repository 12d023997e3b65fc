#include <doctest.h>

#include <cmath>
#include <random>

#include "gradsense/error.hpp"
#include "gradsense/fourier.hpp"
#include "gradsense/metrics.hpp"
#include "gradsense/raster_io.hpp"
#include "test_support.hpp"

using namespace gradsense;

namespace {

Field random_field(std::size_t w, std::size_t h, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, scale);
  Field f(w, h);
  for (double& v : f.values()) v = n(rng);
  return f;
}

double max_abs_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  }
  return m;
}

}  // namespace

TEST_CASE("ternary dequantization uses interval midpoints") {
  const ReconConfig cfg;
  const DequantTable t = DequantTable::make(QuantScheme::make(SchemeId::OneDir1p5Bit), cfg);
  CHECK(t.value(1) == doctest::Approx((4.0 + 32.0) / (2.0 * 255.0)));
  CHECK(t.value(-1) == doctest::Approx(-(4.0 + 32.0) / (2.0 * 255.0)));
  CHECK(t.value(0) == 0.0);
  CHECK_THROWS_AS(t.value(2), InvalidArgument);

  const DequantTable q = DequantTable::make(QuantScheme::make(SchemeId::OneDir2Bit), cfg);
  CHECK(q.value(-2) == doctest::Approx(-20.0 / 255));
  CHECK(q.value(-1) == doctest::Approx(-6.0 / 255));
  CHECK(q.value(0) == 0.0);
  CHECK(q.value(1) == doctest::Approx(18.0 / 255));

  const DequantTable b = DequantTable::make(QuantScheme::make(SchemeId::OneDir1Bit), cfg);
  CHECK(b.value(0) == 0.0);
  CHECK(b.value(1) == doctest::Approx(16.5 / 255));
}

TEST_CASE("dequantization overrides and validation") {
  ReconConfig cfg;
  cfg.dequant_overrides = {{1, 10.0}, {-1, -10.0}};
  const DequantTable t = DequantTable::make(QuantScheme::make(SchemeId::OneDir1p5Bit), cfg);
  CHECK(t.value(1) == doctest::Approx(10.0 / 255));
  cfg.dequant_overrides = {{1, -10.0}};
  CHECK_THROWS_AS(DequantTable::make(QuantScheme::make(SchemeId::OneDir1p5Bit), cfg),
                  InvalidArgument);
  cfg.dequant_overrides = {{5, 1.0}};
  CHECK_THROWS_AS(DequantTable::make(QuantScheme::make(SchemeId::OneDir1p5Bit), cfg),
                  InvalidArgument);
  ReconConfig tight;
  tight.saturation_8bit = 4.0;
  CHECK_THROWS_AS(DequantTable::make(QuantScheme::make(SchemeId::OneDir1p5Bit), tight),
                  InvalidArgument);
}

TEST_CASE("checkerboard gaps take the mean of their neighbours") {
  const QuantScheme e = QuantScheme::make(SchemeId::TwoDir2BitHalfRes);
  // 3x2 even lattice: (0,0) (0,2) (1,1).
  const GradientMap m(3, 2, Direction::X, e, {1, -2, -1});
  const Field f = dequantize(m, ReconConfig{});
  const double p1 = 18.0 / 255, m2 = -20.0 / 255, m1 = -6.0 / 255;
  CHECK(f(0, 0) == doctest::Approx(p1));
  CHECK(f(0, 1) == doctest::Approx((p1 + m2 + m1) / 3));
  CHECK(f(1, 0) == doctest::Approx((p1 + m1) / 2));
  CHECK(f(1, 2) == doctest::Approx((m2 + m1) / 2));
}

TEST_CASE("lambda = 0 returns the upsampled LRI scaled by 1/(1+beta)") {
  const RasterImage lri = testing::random_image(6, 5, 1);
  ReconConfig cfg;
  cfg.lambda = 0.0;
  cfg.upsample_factor = 4;
  const Field gx = random_field(24, 20, 2, 0.05);
  const Field out = reconstruct_unclamped(lri, gx, cfg);
  const Field u = upsample_zoh(lri.pixels(), 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    CHECK(out.values()[i] == doctest::Approx(u.values()[i] / (1.0 + cfg.beta)).epsilon(1e-12));
  }
}

TEST_CASE("solution satisfies the normal equations") {
  for (bool with_y : {false, true}) {
    for (std::size_t k : {1u, 3u, 8u}) {
      const RasterImage lri = testing::random_image(7, 5, k);
      ReconConfig cfg;
      cfg.upsample_factor = static_cast<int>(k);
      cfg.lambda = 2.5;
      const Field gx = random_field(7 * k, 5 * k, 10 + k, 0.05);
      const Field gy = random_field(7 * k, 5 * k, 20 + k, 0.05);
      const Field* pgy = with_y ? &gy : nullptr;
      const Field out = reconstruct_unclamped(lri, gx, cfg, pgy);
      CHECK(residual_check(out, lri, gx, cfg, pgy) < 1e-10);
    }
  }
}

TEST_CASE("reconstruction is linear in (LRI, gradients)") {
  ReconConfig cfg;
  cfg.upsample_factor = 4;
  const RasterImage l1 = testing::random_image(8, 6, 1);
  const RasterImage l2 = testing::random_image(8, 6, 2);
  const Field g1 = random_field(32, 24, 3, 0.05);
  const Field g2 = random_field(32, 24, 4, 0.05);
  std::vector<double> lm;
  for (std::size_t i = 0; i < l1.size(); ++i) lm.push_back(0.5 * (l1.data()[i] + l2.data()[i]));
  Field gm(32, 24);
  for (std::size_t i = 0; i < gm.size(); ++i) gm.values()[i] = 0.5 * (g1.values()[i] + g2.values()[i]);
  const Field r1 = reconstruct_unclamped(l1, g1, cfg);
  const Field r2 = reconstruct_unclamped(l2, g2, cfg);
  const Field rm = reconstruct_unclamped(RasterImage(8, 6, lm), gm, cfg);
  Field expected(32, 24);
  for (std::size_t i = 0; i < rm.size(); ++i) {
    expected.values()[i] = 0.5 * (r1.values()[i] + r2.values()[i]);
  }
  CHECK(max_abs_diff(rm, expected) < 1e-12);
}

TEST_CASE("solution is a local minimum of the objective") {
  ReconConfig cfg;
  cfg.upsample_factor = 2;
  const RasterImage lri = testing::random_image(10, 8, 5);
  const Field gx = random_field(20, 16, 6, 0.05);
  const Field best = reconstruct_unclamped(lri, gx, cfg);
  const double f0 = objective(best, lri, gx, cfg);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Field d = random_field(20, 16, rng(), 1e-3);
    Field moved = best;
    for (std::size_t i = 0; i < moved.size(); ++i) moved.values()[i] += d.values()[i];
    CHECK(objective(moved, lri, gx, cfg) > f0);
  }
}

TEST_CASE("factor 1 with exact periodic gradients reproduces the image") {
  const RasterImage img = testing::pattern_image(64, 48);
  ReconConfig cfg;
  cfg.upsample_factor = 1;
  const Field gx = gradient_exact(img, Direction::X, Boundary::Periodic);
  const RasterImage out = reconstruct_closed_form(img, gx, cfg);
  CHECK(psnr(out, img) >= 60.0);
}

TEST_CASE("exact gradients beat plain upsampling at factor 8") {
  const RasterImage img = load_image(testing::data_dir() / "corpus" / "camera.png");
  const RasterImage lri = downsample_avg(img, 8);
  const Field gx = gradient_exact(img, Direction::X);
  const RasterImage out = reconstruct_closed_form(lri, gx, ReconConfig{});
  CHECK(psnr(out, img) > psnr(upsample_zoh(lri, 8), img));
  const Field gy = gradient_exact(img, Direction::Y);
  const RasterImage both = reconstruct_closed_form(lri, gx, ReconConfig{}, &gy);
  CHECK(psnr(both, img) > psnr(out, img));
}

TEST_CASE("odd and non-power-of-two sizes work") {
  const RasterImage lri = testing::random_image(5, 3, 9);
  ReconConfig cfg;
  cfg.upsample_factor = 7;
  const Field gx = random_field(35, 21, 10, 0.02);
  const Field out = reconstruct_unclamped(lri, gx, cfg);
  CHECK(residual_check(out, lri, gx, cfg) < 1e-10);
}

TEST_CASE("invalid inputs are rejected") {
  const RasterImage lri = testing::random_image(4, 4, 1);
  const Field gx(32, 32);
  ReconConfig cfg;
  cfg.beta = 0.0;
  CHECK_THROWS_AS(reconstruct_unclamped(lri, gx, cfg), InvalidArgument);
  cfg = ReconConfig{};
  CHECK_THROWS_AS(reconstruct_unclamped(lri, Field(31, 32), cfg), InvalidArgument);
  const Field gy(16, 16);
  CHECK_THROWS_AS(reconstruct_unclamped(lri, gx, cfg, &gy), InvalidArgument);
  cfg.lambda = -1.0;
  CHECK_THROWS_AS(reconstruct_unclamped(lri, gx, cfg), InvalidArgument);
}

TEST_CASE("periodic difference adjoint identity") {
  const Field a = random_field(9, 7, 1, 1.0);
  const Field b = random_field(9, 7, 2, 1.0);
  for (Direction d : {Direction::X, Direction::Y}) {
    const Field da = periodic_diff(a, d);
    const Field dtb = periodic_diff_adjoint(b, d);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      lhs += da.values()[i] * b.values()[i];
      rhs += a.values()[i] * dtb.values()[i];
    }
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}
