#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace fundus {

/// One RGB sample.
struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

enum class Channel { Red = 0, Green = 1, Blue = 2 };

/// 8-bit single-channel image, row-major.
class GrayRaster {
 public:
  GrayRaster() = default;
  GrayRaster(int width, int height, std::uint8_t fill = 0);
  GrayRaster(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return pixels_.size(); }
  bool empty() const noexcept { return pixels_.empty(); }

  std::uint8_t operator()(int x, int y) const noexcept { return pixels_[index(x, y)]; }
  std::uint8_t& operator()(int x, int y) noexcept { return pixels_[index(x, y)]; }

  /// Edge-replicated read: coordinates outside the raster clamp to the border.
  std::uint8_t clamped(int x, int y) const noexcept;

  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::span<std::uint8_t> pixels() noexcept { return pixels_; }

  friend bool operator==(const GrayRaster&, const GrayRaster&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// 8-bit interleaved RGB image, row-major; data holds 3 * width * height bytes.
class RgbRaster {
 public:
  RgbRaster() = default;
  RgbRaster(int width, int height, Rgb fill = {});
  RgbRaster(int width, int height, std::vector<std::uint8_t> interleaved);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept { return data_.size() / 3; }
  bool empty() const noexcept { return data_.empty(); }

  Rgb at(int x, int y) const noexcept {
    const std::size_t i = 3 * index(x, y);
    return {data_[i], data_[i + 1], data_[i + 2]};
  }
  void set(int x, int y, Rgb value) noexcept {
    const std::size_t i = 3 * index(x, y);
    data_[i] = value.r;
    data_[i + 1] = value.g;
    data_[i + 2] = value.b;
  }

  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::span<std::uint8_t> data() noexcept { return data_; }

  friend bool operator==(const RgbRaster&, const RgbRaster&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Segmentation output. Every sample is 0 or 255.
class BinaryMask {
 public:
  static constexpr std::uint8_t kOn = 255;

  BinaryMask() = default;
  BinaryMask(int width, int height, bool fill = false);

  /// Throws std::invalid_argument if any sample is outside {0, 255}.
  static BinaryMask from_gray(GrayRaster gray);

  int width() const noexcept { return raster_.width(); }
  int height() const noexcept { return raster_.height(); }
  std::size_t size() const noexcept { return raster_.size(); }

  bool test(int x, int y) const noexcept { return raster_(x, y) != 0; }
  void set(int x, int y, bool on = true) noexcept { raster_(x, y) = on ? kOn : 0; }

  std::span<const std::uint8_t> pixels() const noexcept { return raster_.pixels(); }
  const GrayRaster& gray() const noexcept { return raster_; }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  explicit BinaryMask(GrayRaster raster) : raster_(std::move(raster)) {}
  GrayRaster raster_;
};

template <typename A, typename B>
bool same_shape(const A& a, const B& b) noexcept {
  return a.width() == b.width() && a.height() == b.height();
}

GrayRaster extract_channel(const RgbRaster& img, Channel channel);

/// Bilinear resize with half-pixel centers: src = (dst + 0.5) * in / out - 0.5,
/// clamped to the source; values rounded half up.
GrayRaster resize_bilinear(const GrayRaster& img, int out_width, int out_height);
RgbRaster resize_bilinear(const RgbRaster& img, int out_width, int out_height);

/// 255 where img > t (strict), else 0.
BinaryMask threshold(const GrayRaster& img, std::uint8_t t);

GrayRaster invert(const GrayRaster& img);

/// max(a - b, 0) per pixel.
GrayRaster subtract_saturating(const GrayRaster& a, const GrayRaster& b);

std::size_t count_nonzero(const BinaryMask& mask) noexcept;

}  // namespace fundus
