#include <doctest.h>

#include <cmath>
#include <set>

#include "gradsense/error.hpp"
#include "gradsense/sensor.hpp"
#include "test_support.hpp"

using namespace gradsense;

namespace {

/// Brute-force interval membership: level k when g lies in [t_{k-1}, t_k).
int oracle_level(int g8, const QuantScheme& s) {
  const auto t = s.thresholds_8bit();
  for (std::size_t k = 0; k < s.levels().size(); ++k) {
    const bool above_lower = k == 0 || g8 >= t[k - 1];
    const bool below_upper = k == t.size() || g8 < t[k];
    if (above_lower && below_upper) return s.levels()[k];
  }
  return 99;
}

}  // namespace

TEST_CASE("scheme bandwidth and readout accounting") {
  const double bits[] = {1.0, 1.5, 2.0, 2.0, 2.0};
  const int rs[] = {256, 128, 85, 128, 85};
  for (std::size_t i = 0; i < 5; ++i) {
    const QuantScheme s = QuantScheme::make(kAllSchemes[i]);
    CHECK(s.avg_bits_per_pixel() == bits[i]);
    CHECK(readout_speedup(s) == rs[i]);
  }
}

TEST_CASE("default thresholds and alphabets") {
  CHECK(QuantScheme::make(SchemeId::OneDir1Bit).levels().size() == 2);
  const QuantScheme t = QuantScheme::make(SchemeId::OneDir1p5Bit);
  CHECK(std::vector<int>(t.thresholds_8bit().begin(), t.thresholds_8bit().end()) ==
        std::vector<int>{-4, 4});
  const QuantScheme q = QuantScheme::make(SchemeId::OneDir2Bit);
  CHECK(std::vector<int>(q.levels().begin(), q.levels().end()) ==
        std::vector<int>{-2, -1, 0, 1});
  CHECK_THROWS_AS(QuantScheme::make(SchemeId::OneDir1p5Bit, {4, -4}), InvalidArgument);
  CHECK_THROWS_AS(QuantScheme::make(SchemeId::OneDir1p5Bit, {4}), InvalidArgument);
  CHECK_THROWS_AS(QuantScheme::make(SchemeId::OneDir1Bit, {300}), InvalidArgument);
}

TEST_CASE("scheme names parse in all accepted forms") {
  CHECK(parse_scheme_id("OneDir1p5Bit") == SchemeId::OneDir1p5Bit);
  CHECK(parse_scheme_id("1d-1.5b") == SchemeId::OneDir1p5Bit);
  CHECK(parse_scheme_id("e") == SchemeId::TwoDir2BitHalfRes);
  CHECK_FALSE(parse_scheme_id("f").has_value());
}

TEST_CASE("exhaustive 8-bit gradient sweep matches the interval oracle") {
  for (SchemeId id : kAllSchemes) {
    const QuantScheme s = QuantScheme::make(id);
    Field sweep(511, 1);
    for (int g8 = -255; g8 <= 255; ++g8) {
      CHECK(quantize_value(g8 / 255.0, s) == oracle_level(g8, s));
      sweep(0, static_cast<std::size_t>(g8 + 255)) = g8 / 255.0;
    }
    // The half-resolution lattice keeps only even columns of row 0.
    const auto dense = quantize(sweep, s, Direction::X).to_dense(99);
    const Lattice lat = s.lattice(Direction::X);
    for (int g8 = -255; g8 <= 255; ++g8) {
      const auto c = static_cast<std::size_t>(g8 + 255);
      if (on_lattice(0, c, lat)) CHECK(dense(0, c) == oracle_level(g8, s));
    }
  }
}

TEST_CASE("threshold ties go to the upper level") {
  const QuantScheme t = QuantScheme::make(SchemeId::OneDir1p5Bit);
  CHECK(quantize_value(-4 / 255.0, t) == 0);
  CHECK(quantize_value(4 / 255.0, t) == 1);
  CHECK(quantize_value(std::nextafter(4 / 255.0, 0.0), t) == 0);
}

TEST_CASE("forward differences and boundaries") {
  const RasterImage img(3, 2, std::vector<double>{0.1, 0.4, 0.2, 0.5, 0.5, 0.9});
  const Field gx = gradient_exact(img, Direction::X);
  CHECK(gx(0, 0) == doctest::Approx(0.3));
  CHECK(gx(0, 1) == doctest::Approx(-0.2));
  CHECK(gx(0, 2) == 0.0);
  const Field gxp = gradient_exact(img, Direction::X, Boundary::Periodic);
  CHECK(gxp(0, 2) == doctest::Approx(-0.1));
  const Field gy = gradient_exact(img, Direction::Y);
  CHECK(gy(0, 0) == doctest::Approx(0.4));
  CHECK(gy(1, 0) == 0.0);
  const Field gyp = gradient_exact(img, Direction::Y, Boundary::Periodic);
  CHECK(gyp(1, 2) == doctest::Approx(-0.7));
  CHECK_THROWS_AS(gradient_exact(RasterImage(1, 4, 0.0), Direction::X), InvalidArgument);
}

TEST_CASE("constant image quantizes to all-zero maps") {
  const RasterImage flat(32, 16, 0.4);
  for (SchemeId id : kAllSchemes) {
    const Acquisition a = simulate_acquisition(flat, QuantScheme::make(id), 8, 0.0, 1);
    for (const auto& m : a.maps) {
      for (auto v : m.samples()) CHECK(v == 0);
    }
  }
}

TEST_CASE("acquisition shapes per scheme") {
  const RasterImage img = testing::random_image(64, 32, 2);
  const std::size_t counts[] = {1, 1, 1, 2, 2};
  for (std::size_t i = 0; i < 5; ++i) {
    const Acquisition a = simulate_acquisition(img, QuantScheme::make(kAllSchemes[i]), 8, 0.0, 1);
    CHECK(a.maps.size() == counts[i]);
    CHECK(a.lri.width() == 8);
    CHECK(a.lri.height() == 4);
  }
  const Acquisition e = simulate_acquisition(img, QuantScheme::make(SchemeId::TwoDir2BitHalfRes),
                                             8, 0.0, 1);
  CHECK(e.maps[0].samples().size() == 64 * 32 / 2);
  CHECK(e.maps[0].lattice() == Lattice::EvenCheckerboard);
  CHECK(e.maps[1].lattice() == Lattice::OddCheckerboard);
  CHECK_THROWS_AS(simulate_acquisition(testing::random_image(60, 32, 1),
                                       QuantScheme::make(SchemeId::OneDir1Bit), 8, 0.0, 1),
                  InvalidArgument);
  CHECK_THROWS_AS(simulate_acquisition(testing::random_image(9, 9, 1),
                                       QuantScheme::make(SchemeId::TwoDir2BitHalfRes), 3, 0.0, 1),
                  InvalidArgument);
}

TEST_CASE("checkerboard lattices split the frame") {
  for (std::size_t w : {1u, 2u, 5u, 8u}) {
    for (std::size_t h : {1u, 3u, 4u}) {
      CHECK(lattice_sample_count(w, h, Lattice::EvenCheckerboard) +
                lattice_sample_count(w, h, Lattice::OddCheckerboard) ==
            w * h);
    }
  }
  CHECK(on_lattice(0, 0, Lattice::EvenCheckerboard));
  CHECK(on_lattice(0, 1, Lattice::OddCheckerboard));
}

TEST_CASE("gradient maps validate their samples") {
  const QuantScheme t = QuantScheme::make(SchemeId::OneDir1p5Bit);
  CHECK_THROWS_AS(GradientMap(2, 2, Direction::X, t, {0, 0, 0}), InvalidArgument);
  CHECK_THROWS_AS(GradientMap(2, 1, Direction::X, t, {0, 2}), InvalidArgument);
  CHECK_THROWS_AS(GradientMap(2, 1, Direction::Y, t, {0, 0}), InvalidArgument);

  const QuantScheme e = QuantScheme::make(SchemeId::TwoDir2BitHalfRes);
  Grid<std::int8_t> dense(5, 3);
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 5; ++c) {
      dense(r, c) = on_lattice(r, c, Lattice::OddCheckerboard) ? static_cast<std::int8_t>((r + c) % 3 - 1) : 0;
    }
  }
  const GradientMap m = GradientMap::from_dense(dense, Direction::Y, e);
  CHECK(m.samples().size() == 7);
  CHECK(m.to_dense() == dense);
}

TEST_CASE("noise is seeded, zero-mean and clamped") {
  const RasterImage mid(256, 256, 0.5);
  CHECK(add_noise(mid, 0.0, 1) == mid);
  CHECK(add_noise(mid, 0.02, 9) == add_noise(mid, 0.02, 9));
  CHECK_FALSE(add_noise(mid, 0.02, 9) == add_noise(mid, 0.02, 10));
  const RasterImage noisy = add_noise(mid, 0.02, 3);
  double sum = 0.0, sq = 0.0;
  for (double v : noisy.data()) {
    sum += v - 0.5;
    sq += (v - 0.5) * (v - 0.5);
  }
  const double n = static_cast<double>(noisy.size());
  CHECK(std::abs(sum / n) < 3 * 0.02 / std::sqrt(n) + 1e-9);
  CHECK(std::sqrt(sq / n) == doctest::Approx(0.02).epsilon(0.02));
  const RasterImage bright(64, 64, 1.0);
  for (double v : add_noise(bright, 0.3, 1).data()) CHECK(v <= 1.0);
  CHECK_THROWS_AS(add_noise(mid, -1.0, 1), InvalidArgument);
}

TEST_CASE("noise enters the gradients but not the LRI") {
  const RasterImage img = testing::pattern_image(64, 64);
  const QuantScheme s = QuantScheme::make(SchemeId::OneDir1p5Bit);
  const Acquisition clean = simulate_acquisition(img, s, 8, 0.0, 5);
  const Acquisition noisy = simulate_acquisition(img, s, 8, 10.0 / 255, 5);
  CHECK(clean.lri == noisy.lri);
  CHECK_FALSE(clean.maps[0] == noisy.maps[0]);
  CHECK(noisy.maps[0] == simulate_acquisition(img, s, 8, 10.0 / 255, 5).maps[0]);
}

TEST_CASE("derived seeds are distinct") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(42, i));
  CHECK(seen.size() == 1000);
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}
