#include "fundus/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <memory>
#include <vector>

namespace fundus {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw ImageIoError("cannot open " + path.string());
  return f;
}

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageIoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// ---- PNM -------------------------------------------------------------------

struct Pnm {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> data;
};

Pnm parse_pnm(const std::vector<std::uint8_t>& bytes, const std::string& name) {
  std::size_t pos = 2;
  const auto skip_space_and_comments = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  const auto read_int = [&]() -> int {
    skip_space_and_comments();
    if (pos >= bytes.size() || !std::isdigit(bytes[pos])) throw ImageIoError("malformed PNM header in " + name);
    long value = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      value = value * 10 + (bytes[pos++] - '0');
      if (value > (1 << 24)) throw ImageIoError("PNM dimension too large in " + name);
    }
    return static_cast<int>(value);
  };

  Pnm pnm;
  pnm.channels = bytes[1] == '6' ? 3 : 1;
  pnm.width = read_int();
  pnm.height = read_int();
  const int maxval = read_int();
  if (maxval != 255) throw ImageIoError("only 8-bit PNM (maxval 255) is supported: " + name);
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw ImageIoError("malformed PNM header in " + name);
  ++pos;  // single whitespace before the raster
  const std::size_t expected =
      static_cast<std::size_t>(pnm.width) * static_cast<std::size_t>(pnm.height) * pnm.channels;
  if (pnm.width <= 0 || pnm.height <= 0 || bytes.size() - pos < expected) {
    throw ImageIoError("truncated PNM raster in " + name);
  }
  pnm.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                  bytes.begin() + static_cast<std::ptrdiff_t>(pos + expected));
  return pnm;
}

void write_pnm(const std::filesystem::path& path, char magic, int width, int height,
               std::span<const std::uint8_t> data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ImageIoError("cannot write " + path.string());
  out << 'P' << magic << '\n' << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw ImageIoError("write failed for " + path.string());
}

// ---- PNG -------------------------------------------------------------------

[[noreturn]] void png_error_handler(png_structp png, png_const_charp message) {
  auto* what = static_cast<std::string*>(png_get_error_ptr(png));
  if (what) *what = message;
  png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

struct Decoded {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> data;
};

// libpng reports errors via longjmp; no C++ objects with nontrivial
// destructors may be live in this frame between setjmp and the longjmp.
bool decode_png_raw(std::FILE* fp, bool want_gray, Decoded& out, std::string& error) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, png_error_handler, png_warning_handler);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_init_io(png, fp);
  png_read_info(png, info);

  const png_byte color = png_get_color_type(png, info);
  const png_byte depth = png_get_bit_depth(png, info);
  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  const bool is_gray = (color & PNG_COLOR_MASK_COLOR) == 0;
  if (want_gray && !is_gray) png_set_rgb_to_gray_fixed(png, 1, -1, -1);
  if (!want_gray && is_gray) png_set_gray_to_rgb(png);
  png_read_update_info(png, info);

  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.channels = png_get_channels(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  out.data.resize(stride * static_cast<std::size_t>(out.height));
  std::vector<png_bytep>* volatile rows = new std::vector<png_bytep>(static_cast<std::size_t>(out.height));
  for (int y = 0; y < out.height; ++y) (*rows)[static_cast<std::size_t>(y)] = out.data.data() + stride * y;
  if (setjmp(png_jmpbuf(png))) {
    delete rows;
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_read_image(png, rows->data());
  png_read_end(png, nullptr);
  delete rows;
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

Decoded decode_png(const std::filesystem::path& path, bool want_gray) {
  FilePtr fp = open_file(path, "rb");
  Decoded decoded;
  std::string error;
  if (!decode_png_raw(fp.get(), want_gray, decoded, error)) {
    throw ImageIoError("PNG decode failed for " + path.string() + (error.empty() ? "" : ": " + error));
  }
  return decoded;
}

bool encode_png_raw(std::FILE* fp, int width, int height, int color_type, const std::uint8_t* data, int channels,
                    std::string& error) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, png_error_handler, png_warning_handler);
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
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(width) * static_cast<std::size_t>(channels);
  for (int y = 0; y < height; ++y) {
    png_write_row(png, const_cast<png_bytep>(data + stride * static_cast<std::size_t>(y)));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

void encode_png(const std::filesystem::path& path, int width, int height, int color_type,
                std::span<const std::uint8_t> data, int channels) {
  FilePtr fp = open_file(path, "wb");
  std::string error;
  if (!encode_png_raw(fp.get(), width, height, color_type, data.data(), channels, error)) {
    throw ImageIoError("PNG encode failed for " + path.string() + (error.empty() ? "" : ": " + error));
  }
}

enum class Format { Png, Ppm, Pgm, Unknown };

Format sniff(const std::vector<std::uint8_t>& head) {
  static constexpr std::array<std::uint8_t, 8> kPngSig = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
  if (head.size() >= 8 && std::equal(kPngSig.begin(), kPngSig.end(), head.begin())) return Format::Png;
  if (head.size() >= 2 && head[0] == 'P' && head[1] == '6') return Format::Ppm;
  if (head.size() >= 2 && head[0] == 'P' && head[1] == '5') return Format::Pgm;
  return Format::Unknown;
}

}  // namespace

RgbRaster read_rgb(const std::filesystem::path& path) {
  auto bytes = slurp(path);
  switch (sniff(bytes)) {
    case Format::Png: {
      bytes.clear();
      auto d = decode_png(path, false);
      return RgbRaster(d.width, d.height, std::move(d.data));
    }
    case Format::Ppm: {
      auto pnm = parse_pnm(bytes, path.string());
      return RgbRaster(pnm.width, pnm.height, std::move(pnm.data));
    }
    case Format::Pgm: {
      const auto pnm = parse_pnm(bytes, path.string());
      std::vector<std::uint8_t> rgb(pnm.data.size() * 3);
      for (std::size_t i = 0; i < pnm.data.size(); ++i) rgb[3 * i] = rgb[3 * i + 1] = rgb[3 * i + 2] = pnm.data[i];
      return RgbRaster(pnm.width, pnm.height, std::move(rgb));
    }
    case Format::Unknown:
      break;
  }
  throw ImageIoError("unrecognized image format: " + path.string());
}

GrayRaster read_gray(const std::filesystem::path& path) {
  auto bytes = slurp(path);
  switch (sniff(bytes)) {
    case Format::Png: {
      auto d = decode_png(path, true);
      return GrayRaster(d.width, d.height, std::move(d.data));
    }
    case Format::Pgm: {
      auto pnm = parse_pnm(bytes, path.string());
      return GrayRaster(pnm.width, pnm.height, std::move(pnm.data));
    }
    default:
      break;
  }
  throw ImageIoError("not a grayscale image: " + path.string());
}

void write_pgm(const std::filesystem::path& path, const GrayRaster& img) {
  write_pnm(path, '5', img.width(), img.height(), img.pixels());
}

void write_pgm(const std::filesystem::path& path, const BinaryMask& mask) { write_pgm(path, mask.gray()); }

void write_ppm(const std::filesystem::path& path, const RgbRaster& img) {
  write_pnm(path, '6', img.width(), img.height(), img.data());
}

void write_png(const std::filesystem::path& path, const RgbRaster& img) {
  encode_png(path, img.width(), img.height(), PNG_COLOR_TYPE_RGB, img.data(), 3);
}

void write_png(const std::filesystem::path& path, const GrayRaster& img) {
  encode_png(path, img.width(), img.height(), PNG_COLOR_TYPE_GRAY, img.pixels(), 1);
}

bool has_image_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::ranges::transform(ext, ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".ppm" || ext == ".pgm" || ext == ".pnm";
}

}  // namespace fundus
