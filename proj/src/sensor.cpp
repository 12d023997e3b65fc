#include "gradsense/sensor.hpp"

#include <random>
#include <string>

#include "gradsense/kernels.hpp"

namespace gradsense {

GradientMap::GradientMap(std::size_t width, std::size_t height, Direction direction,
                         QuantScheme scheme, std::vector<std::int8_t> samples)
    : width_(width),
      height_(height),
      direction_(direction),
      scheme_(std::move(scheme)),
      samples_(std::move(samples)) {
  if (!scheme_.supports(direction_)) {
    throw InvalidArgument(std::string(to_string(scheme_.id())) + " does not measure direction " +
                          std::string(to_string(direction_)));
  }
  if (samples_.size() != lattice_sample_count(width_, height_, lattice())) {
    throw InvalidArgument("gradient map sample count does not match its lattice");
  }
  bool allowed[256] = {};
  for (std::int8_t l : scheme_.levels()) allowed[static_cast<std::uint8_t>(l)] = true;
  for (std::int8_t v : samples_) {
    if (!allowed[static_cast<std::uint8_t>(v)]) {
      throw InvalidArgument("level " + std::to_string(v) + " not in scheme alphabet");
    }
  }
}

GradientMap GradientMap::from_dense(const Grid<std::int8_t>& levels, Direction direction,
                                    const QuantScheme& scheme) {
  const Lattice lat = scheme.lattice(direction);
  std::vector<std::int8_t> samples;
  samples.reserve(lattice_sample_count(levels.width(), levels.height(), lat));
  for (std::size_t r = 0; r < levels.height(); ++r) {
    for (std::size_t c = 0; c < levels.width(); ++c) {
      if (on_lattice(r, c, lat)) samples.push_back(levels(r, c));
    }
  }
  return GradientMap(levels.width(), levels.height(), direction, scheme, std::move(samples));
}

Grid<std::int8_t> GradientMap::to_dense(std::int8_t fill) const {
  Grid<std::int8_t> out(width_, height_, fill);
  const Lattice lat = lattice();
  std::size_t i = 0;
  for (std::size_t r = 0; r < height_; ++r) {
    for (std::size_t c = 0; c < width_; ++c) {
      if (on_lattice(r, c, lat)) out(r, c) = samples_[i++];
    }
  }
  return out;
}

Field gradient_exact(const RasterImage& img, Direction direction, Boundary boundary) {
  const std::size_t w = img.width();
  const std::size_t h = img.height();
  if ((direction == Direction::X && w < 2) || (direction == Direction::Y && h < 2)) {
    throw InvalidArgument("gradient_exact: image is a single pixel wide along the direction");
  }
  const auto& kern = kernels::active();
  const bool periodic = boundary == Boundary::Periodic;
  Field out(w, h);
  if (direction == Direction::X) {
    kern.diff_x(img.pixels().data(), out.data(), w, h, periodic);
    return out;
  }
  for (std::size_t r = 0; r + 1 < h; ++r) {
    kern.diff_rows(img.pixels().row(r).data(), img.pixels().row(r + 1).data(), out.row(r).data(),
                   w);
  }
  if (periodic) {
    kern.diff_rows(img.pixels().row(h - 1).data(), img.pixels().row(0).data(),
                   out.row(h - 1).data(), w);
  }
  return out;
}

std::int8_t quantize_value(double g, const QuantScheme& scheme) {
  const auto thresholds = scheme.thresholds();
  std::int8_t out = 0;
  kernels::scalar_kernels().quantize(&g, &out, 1, thresholds.data(), thresholds.size(),
                                     scheme.levels().data());
  return out;
}

GradientMap quantize(const Field& field, const QuantScheme& scheme, Direction direction) {
  if (!scheme.supports(direction)) {
    throw InvalidArgument(std::string(to_string(scheme.id())) + " does not measure direction " +
                          std::string(to_string(direction)));
  }
  const auto thresholds = scheme.thresholds();
  const Lattice lat = scheme.lattice(direction);
  const auto& kern = kernels::active();

  std::vector<std::int8_t> samples(lattice_sample_count(field.width(), field.height(), lat));
  if (lat == Lattice::Full) {
    kern.quantize(field.data(), samples.data(), field.size(), thresholds.data(), thresholds.size(),
                  scheme.levels().data());
  } else {
    std::vector<double> gathered;
    gathered.reserve(samples.size());
    for (std::size_t r = 0; r < field.height(); ++r) {
      for (std::size_t c = 0; c < field.width(); ++c) {
        if (on_lattice(r, c, lat)) gathered.push_back(field(r, c));
      }
    }
    kern.quantize(gathered.data(), samples.data(), gathered.size(), thresholds.data(),
                  thresholds.size(), scheme.levels().data());
  }
  return GradientMap(field.width(), field.height(), direction, scheme, std::move(samples));
}

std::vector<double> gaussian_noise(std::size_t count, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw InvalidArgument("noise sigma must be >= 0");
  std::vector<double> out(count, 0.0);
  if (sigma == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, sigma);
  for (double& v : out) v = dist(rng);
  return out;
}

RasterImage add_noise(const RasterImage& img, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw InvalidArgument("noise sigma must be >= 0");
  if (sigma == 0.0) return img;
  const auto noise = gaussian_noise(img.size(), sigma, seed);
  Field out = img.pixels();
  auto px = out.values();
  for (std::size_t i = 0; i < px.size(); ++i) px[i] += noise[i];
  return RasterImage::clamped(std::move(out), img.source_bit_depth());
}

Acquisition simulate_acquisition(const RasterImage& hr, const QuantScheme& scheme, int lri_factor,
                                 double noise_sigma, std::uint64_t seed) {
  if (lri_factor <= 0) throw InvalidArgument("lri_factor must be >= 1");
  const auto k = static_cast<std::size_t>(lri_factor);
  if (hr.width() % k != 0 || hr.height() % k != 0) {
    throw InvalidArgument("image " + std::to_string(hr.width()) + "x" +
                          std::to_string(hr.height()) + " not divisible by LRI factor " +
                          std::to_string(k));
  }
  if (scheme.id() == SchemeId::TwoDir2BitHalfRes && (hr.width() % 2 != 0 || hr.height() % 2 != 0)) {
    throw InvalidArgument("half-resolution scheme needs even image dimensions");
  }

  const RasterImage noisy = add_noise(hr, noise_sigma, seed);
  Acquisition acq;
  for (Direction d : scheme.directions()) {
    acq.maps.push_back(quantize(gradient_exact(noisy, d), scheme, d));
  }
  acq.lri = downsample_avg(hr, lri_factor);
  return acq;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base ^ (index * 0x9E3779B97F4A7C15ull);
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace gradsense
