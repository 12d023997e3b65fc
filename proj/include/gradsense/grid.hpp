#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "gradsense/error.hpp"

namespace gradsense {

/// Dense row-major 2-D array. Used for real-valued fields (gradients,
/// unclamped reconstructions) and as storage behind RasterImage.
template <class T>
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t width, std::size_t height, T fill = T{})
      : width_(width), height_(height), values_(width * height, fill) {}
  Grid(std::size_t width, std::size_t height, std::vector<T> values)
      : width_(width), height_(height), values_(std::move(values)) {
    if (values_.size() != width_ * height_) {
      throw InvalidArgument("grid data length does not match width x height");
    }
  }

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  T& operator()(std::size_t row, std::size_t col) noexcept { return values_[row * width_ + col]; }
  const T& operator()(std::size_t row, std::size_t col) const noexcept {
    return values_[row * width_ + col];
  }

  std::span<T> values() noexcept { return values_; }
  std::span<const T> values() const noexcept { return values_; }
  std::span<T> row(std::size_t r) noexcept { return {values_.data() + r * width_, width_}; }
  std::span<const T> row(std::size_t r) const noexcept {
    return {values_.data() + r * width_, width_};
  }

  T* data() noexcept { return values_.data(); }
  const T* data() const noexcept { return values_.data(); }

  std::vector<T> release() && { return std::move(values_); }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<T> values_;
};

using Field = Grid<double>;

}  // namespace gradsense
