#pragma once

#include <filesystem>

#include "gradsense/raster.hpp"

namespace gradsense {

/// Reads a PNG or binary PGM/PPM (P5/P6) file. Grayscale and RGB(A) inputs of
/// 8 or 16 bits are accepted; PGM/PPM maxval may also be 1023 or 4095. Color is
/// converted to luma with weights 0.299/0.587/0.114 and values are normalized
/// by 2^bits - 1. The container is detected from the file signature.
RasterImage load_image(const std::filesystem::path& path);

/// Writes a grayscale image at the image's source bit depth. The container is
/// chosen by extension: `.pgm` writes P5 (any supported depth), anything else
/// writes PNG (8 bits, or 16 bits for deeper sources).
void save_image(const RasterImage& img, const std::filesystem::path& path);

}  // namespace gradsense
