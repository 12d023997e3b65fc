#include "gradsense/tile.hpp"

#include <string>

namespace gradsense {
namespace {

std::vector<std::size_t> starts(std::size_t extent, std::size_t tile, std::size_t step) {
  std::vector<std::size_t> out;
  for (std::size_t pos = 0;; pos += step) {
    out.push_back(pos);
    if (pos + tile >= extent) break;
  }
  return out;
}

}  // namespace

TileGrid TileGrid::make(std::size_t image_width, std::size_t image_height, std::size_t tile_width,
                        std::size_t tile_height, std::size_t overlap) {
  if (tile_width == 0 || tile_height == 0) throw InvalidArgument("tile dimensions must be >= 1");
  if (tile_width > image_width || tile_height > image_height) {
    throw InvalidArgument("tile " + std::to_string(tile_width) + "x" +
                          std::to_string(tile_height) + " larger than image " +
                          std::to_string(image_width) + "x" + std::to_string(image_height));
  }
  if (overlap >= tile_width || overlap >= tile_height) {
    throw InvalidArgument("tile overlap must be smaller than the tile");
  }

  TileGrid grid;
  grid.image_width = image_width;
  grid.image_height = image_height;
  grid.tile_width = tile_width;
  grid.tile_height = tile_height;
  grid.overlap = overlap;

  const auto xs = starts(image_width, tile_width, tile_width - overlap);
  const auto ys = starts(image_height, tile_height, tile_height - overlap);
  grid.columns = xs.size();
  grid.rows = ys.size();
  for (std::size_t y : ys) {
    for (std::size_t x : xs) {
      const std::size_t w = std::min(tile_width, image_width - x);
      const std::size_t h = std::min(tile_height, image_height - y);
      grid.tiles.push_back({x, y, w, h, w != tile_width || h != tile_height});
    }
  }
  return grid;
}

TileGrid TileGrid::scaled_down(std::size_t factor) const {
  if (factor == 0) throw InvalidArgument("scale factor must be >= 1");
  const auto divisible = [factor](std::size_t v) { return v % factor == 0; };
  if (!divisible(image_width) || !divisible(image_height) || !divisible(tile_width) ||
      !divisible(tile_height) || !divisible(overlap)) {
    throw InvalidArgument("tile grid is not aligned to factor " + std::to_string(factor));
  }
  TileGrid out = *this;
  out.image_width /= factor;
  out.image_height /= factor;
  out.tile_width /= factor;
  out.tile_height /= factor;
  out.overlap /= factor;
  for (TileRect& t : out.tiles) {
    if (!divisible(t.x) || !divisible(t.y) || !divisible(t.width) || !divisible(t.height)) {
      throw InvalidArgument("tile is not aligned to factor " + std::to_string(factor));
    }
    t.x /= factor;
    t.y /= factor;
    t.width /= factor;
    t.height /= factor;
  }
  return out;
}

Field untile(std::span<const Field> tiles, const TileGrid& layout) {
  if (tiles.size() != layout.tiles.size()) throw InvalidArgument("tile count mismatch");
  Field sum(layout.image_width, layout.image_height);
  Grid<unsigned> hits(layout.image_width, layout.image_height, 0u);
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    const TileRect& t = layout.tiles[i];
    if (tiles[i].width() != t.width || tiles[i].height() != t.height) {
      throw InvalidArgument("tile " + std::to_string(i) + " has wrong dimensions");
    }
    for (std::size_t r = 0; r < t.height; ++r) {
      for (std::size_t c = 0; c < t.width; ++c) {
        sum(t.y + r, t.x + c) += tiles[i](r, c);
        hits(t.y + r, t.x + c) += 1;
      }
    }
  }
  if (layout.overlap > 0) {
    for (std::size_t i = 0; i < sum.size(); ++i) {
      if (hits.values()[i] > 1) sum.values()[i] /= hits.values()[i];
    }
  }
  return sum;
}

std::vector<RasterImage> tile(const RasterImage& img, const TileGrid& layout) {
  std::vector<RasterImage> out;
  for (Field& f : tile(img.pixels(), layout)) {
    out.emplace_back(std::move(f), img.source_bit_depth());
  }
  return out;
}

RasterImage untile(std::span<const RasterImage> tiles, const TileGrid& layout) {
  std::vector<Field> fields;
  fields.reserve(tiles.size());
  for (const RasterImage& t : tiles) fields.push_back(t.pixels());
  const int bits = tiles.empty() ? 8 : tiles.front().source_bit_depth();
  return RasterImage::clamped(untile(fields, layout), bits);
}

}  // namespace gradsense
