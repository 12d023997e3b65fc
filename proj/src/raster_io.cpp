#include "gradsense/raster_io.hpp"

#include <png.h>

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

namespace gradsense {
namespace {

namespace fs = std::filesystem;

constexpr double kLumaR = 0.299;
constexpr double kLumaG = 0.587;
constexpr double kLumaB = 0.114;

struct FileCloser {
  void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const fs::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw IoError("cannot open " + path.string() + ": " + std::strerror(errno));
  return f;
}

/// Interleaved samples with 1 (gray) or 3 (RGB) channels, before normalization.
struct Samples {
  std::size_t width = 0;
  std::size_t height = 0;
  int channels = 1;
  int bit_depth = 8;
  std::vector<std::uint16_t> values;
};

RasterImage to_image(const Samples& s) {
  const double max_value = std::ldexp(1.0, s.bit_depth) - 1.0;
  Field out(s.width, s.height);
  auto px = out.values();
  for (std::size_t i = 0; i < px.size(); ++i) {
    if (s.channels == 1) {
      px[i] = s.values[i] / max_value;
    } else {
      const std::uint16_t* rgb = &s.values[3 * i];
      px[i] = (kLumaR * rgb[0] + kLumaG * rgb[1] + kLumaB * rgb[2]) / max_value;
    }
  }
  return RasterImage::clamped(std::move(out), s.bit_depth);
}

// ---- PNG -------------------------------------------------------------------

struct PngErrorState {
  char message[256] = "libpng error";
};

void png_error_handler(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
  std::snprintf(state->message, sizeof state->message, "%s", msg);
  png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

// Only trivially destructible locals live between setjmp and the longjmp targets.
bool read_png_samples(std::FILE* fp, Samples& out, PngErrorState& err) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_handler,
                                           png_warning_handler);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  std::vector<png_bytep> row_ptrs;
  std::vector<png_byte> buffer;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_init_io(png, fp);
  png_read_info(png, info);

  const png_byte color_type = png_get_color_type(png, info);
  const png_byte depth = png_get_bit_depth(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  if (depth == 16) png_set_swap(png);
  png_read_update_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int channels = png_get_channels(png, info);
  const int out_depth = png_get_bit_depth(png, info);
  const std::size_t rowbytes = png_get_rowbytes(png, info);

  buffer.resize(rowbytes * height);
  row_ptrs.resize(height);
  for (png_uint_32 r = 0; r < height; ++r) row_ptrs[r] = buffer.data() + r * rowbytes;
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  out.width = width;
  out.height = height;
  out.channels = channels;
  out.bit_depth = out_depth;
  out.values.resize(static_cast<std::size_t>(width) * height * channels);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    if (out_depth == 16) {
      std::uint16_t v;
      std::memcpy(&v, buffer.data() + 2 * i, 2);
      out.values[i] = v;
    } else {
      out.values[i] = buffer[i];
    }
  }
  return true;
}

RasterImage load_png(const fs::path& path) {
  FilePtr fp = open_file(path, "rb");
  Samples s;
  PngErrorState err;
  if (!read_png_samples(fp.get(), s, err)) {
    throw IoError("cannot decode PNG " + path.string() + ": " + err.message);
  }
  if (s.channels != 1 && s.channels != 3) {
    throw IoError("unsupported PNG channel layout in " + path.string());
  }
  if (s.bit_depth != 8 && s.bit_depth != 16) {
    throw IoError("unsupported PNG bit depth " + std::to_string(s.bit_depth));
  }
  return to_image(s);
}

bool write_png_rows(std::FILE* fp, std::size_t width, std::size_t height, int depth,
                    std::vector<png_bytep>& rows, PngErrorState& err) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_error_handler,
                                            png_warning_handler);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), depth,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (depth == 16) png_set_swap(png);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

std::uint16_t to_code(double v, double max_value) {
  return static_cast<std::uint16_t>(std::lround(v * max_value));
}

void save_png(const RasterImage& img, const fs::path& path) {
  const int depth = img.source_bit_depth() == 8 ? 8 : 16;
  const double max_value = std::ldexp(1.0, depth) - 1.0;
  const std::size_t bytes_per_sample = depth / 8;
  std::vector<png_byte> buffer(img.size() * bytes_per_sample);
  for (std::size_t i = 0; i < img.size(); ++i) {
    const std::uint16_t code = to_code(img.data()[i], max_value);
    if (depth == 8) {
      buffer[i] = static_cast<png_byte>(code);
    } else {
      std::memcpy(buffer.data() + 2 * i, &code, 2);
    }
  }
  std::vector<png_bytep> rows(img.height());
  for (std::size_t r = 0; r < img.height(); ++r) {
    rows[r] = buffer.data() + r * img.width() * bytes_per_sample;
  }
  FilePtr fp = open_file(path, "wb");
  PngErrorState err;
  if (!write_png_rows(fp.get(), img.width(), img.height(), depth, rows, err)) {
    throw IoError("cannot write PNG " + path.string() + ": " + err.message);
  }
}

// ---- PGM / PPM -------------------------------------------------------------

std::size_t read_header_int(std::istream& in, const fs::path& path) {
  int c = in.peek();
  while (c != EOF) {
    if (std::isspace(c)) {
      in.get();
    } else if (c == '#') {
      std::string ignored;
      std::getline(in, ignored);
    } else {
      break;
    }
    c = in.peek();
  }
  std::size_t value = 0;
  if (!(in >> value)) throw IoError("malformed PNM header in " + path.string());
  return value;
}

int bits_for_maxval(std::size_t maxval) {
  for (int bits : {8, 10, 12, 16}) {
    if (maxval == (std::size_t{1} << bits) - 1) return bits;
  }
  return 0;
}

RasterImage load_pnm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[2];
  in.read(magic, 2);
  const int channels = magic[1] == '5' ? 1 : 3;
  Samples s;
  s.channels = channels;
  s.width = read_header_int(in, path);
  s.height = read_header_int(in, path);
  const std::size_t maxval = read_header_int(in, path);
  s.bit_depth = bits_for_maxval(maxval);
  if (s.bit_depth == 0) {
    throw IoError("unsupported PNM maxval " + std::to_string(maxval) + " in " + path.string());
  }
  in.get();  // single whitespace before the raster

  const std::size_t count = s.width * s.height * channels;
  const std::size_t bytes_per_sample = maxval < 256 ? 1 : 2;
  std::vector<unsigned char> raw(count * bytes_per_sample);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
    throw IoError("truncated PNM raster in " + path.string());
  }
  s.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    s.values[i] = bytes_per_sample == 1 ? raw[i]
                                        : static_cast<std::uint16_t>(raw[2 * i] << 8 | raw[2 * i + 1]);
    if (s.values[i] > maxval) throw IoError("PNM sample exceeds maxval in " + path.string());
  }
  return to_image(s);
}

void save_pgm(const RasterImage& img, const fs::path& path) {
  const int bits = img.source_bit_depth();
  const std::size_t maxval = (std::size_t{1} << bits) - 1;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "P5\n" << img.width() << ' ' << img.height() << '\n' << maxval << '\n';
  std::vector<unsigned char> raw;
  raw.reserve(img.size() * (bits == 8 ? 1 : 2));
  for (double v : img.data()) {
    const std::uint16_t code = to_code(v, static_cast<double>(maxval));
    if (bits == 8) {
      raw.push_back(static_cast<unsigned char>(code));
    } else {
      raw.push_back(static_cast<unsigned char>(code >> 8));
      raw.push_back(static_cast<unsigned char>(code & 0xFF));
    }
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

enum class Container { Png, Pnm, Unknown };

Container sniff(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::array<unsigned char, 8> sig{};
  in.read(reinterpret_cast<char*>(sig.data()), sig.size());
  if (in.gcount() >= 8 && png_sig_cmp(sig.data(), 0, 8) == 0) return Container::Png;
  if (in.gcount() >= 2 && sig[0] == 'P' && (sig[1] == '5' || sig[1] == '6')) return Container::Pnm;
  return Container::Unknown;
}

}  // namespace

RasterImage load_image(const fs::path& path) {
  switch (sniff(path)) {
    case Container::Png: return load_png(path);
    case Container::Pnm: return load_pnm(path);
    case Container::Unknown: break;
  }
  throw IoError("unrecognized image format: " + path.string());
}

void save_image(const RasterImage& img, const fs::path& path) {
  if (path.extension() == ".pgm") {
    save_pgm(img, path);
  } else {
    save_png(img, path);
  }
}

}  // namespace gradsense
