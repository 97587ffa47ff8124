#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "fundus/raster.hpp"

namespace fundus {

class ImageIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Decodes an 8-bit PNG, binary PPM (P6) or binary PGM (P5), sniffing the
/// format from the file signature. Grayscale inputs are replicated to RGB and
/// PNG alpha is discarded.
RgbRaster read_rgb(const std::filesystem::path& path);

/// Reads a P5 file or a grayscale PNG without RGB expansion.
GrayRaster read_gray(const std::filesystem::path& path);

void write_pgm(const std::filesystem::path& path, const GrayRaster& img);
void write_pgm(const std::filesystem::path& path, const BinaryMask& mask);
void write_ppm(const std::filesystem::path& path, const RgbRaster& img);
void write_png(const std::filesystem::path& path, const RgbRaster& img);
void write_png(const std::filesystem::path& path, const GrayRaster& img);

/// True for extensions the decoder accepts (.png, .ppm, .pgm, .pnm; case-insensitive).
bool has_image_extension(const std::filesystem::path& path);

}  // namespace fundus
