#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "gradsense/raster.hpp"

namespace gradsense {

struct TileRect {
  std::size_t x = 0;
  std::size_t y = 0;
  std::size_t width = 0;
  std::size_t height = 0;
  bool partial = false;  // clipped by the image border

  friend bool operator==(const TileRect&, const TileRect&) = default;
};

/// Row-major tiling of an image. Tiles advance by (tile - overlap); the last tile
/// in a row or column is clipped to the border and flagged `partial` when the
/// image size is not a whole number of steps.
struct TileGrid {
  std::size_t image_width = 0;
  std::size_t image_height = 0;
  std::size_t tile_width = 0;
  std::size_t tile_height = 0;
  std::size_t overlap = 0;
  std::size_t columns = 0;
  std::size_t rows = 0;
  std::vector<TileRect> tiles;

  /// Throws InvalidArgument when a tile dimension exceeds the image or
  /// overlap >= tile dimension.
  static TileGrid make(std::size_t image_width, std::size_t image_height, std::size_t tile_width,
                       std::size_t tile_height, std::size_t overlap = 0);

  /// The same grid on an image `factor` times smaller, e.g. the LRI grid matching
  /// a full-resolution gradient grid. Every coordinate must divide by `factor`.
  TileGrid scaled_down(std::size_t factor) const;
};

template <class T>
std::vector<Grid<T>> tile(const Grid<T>& grid, const TileGrid& layout) {
  if (grid.width() != layout.image_width || grid.height() != layout.image_height) {
    throw InvalidArgument("tile grid does not match image dimensions");
  }
  std::vector<Grid<T>> out;
  out.reserve(layout.tiles.size());
  for (const TileRect& t : layout.tiles) {
    Grid<T> piece(t.width, t.height);
    for (std::size_t r = 0; r < t.height; ++r) {
      const auto src = grid.row(t.y + r).subspan(t.x, t.width);
      std::copy(src.begin(), src.end(), piece.row(r).begin());
    }
    out.push_back(std::move(piece));
  }
  return out;
}

/// Reassembles tiles; overlapping pixels are averaged.
Field untile(std::span<const Field> tiles, const TileGrid& layout);

std::vector<RasterImage> tile(const RasterImage& img, const TileGrid& layout);
RasterImage untile(std::span<const RasterImage> tiles, const TileGrid& layout);

}  // namespace gradsense
