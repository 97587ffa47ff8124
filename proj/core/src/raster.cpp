#include "fundus/raster.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fundus {

namespace {

void require_dims(int width, int height) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("raster dimensions must be positive, got " + std::to_string(width) + "x" +
                                std::to_string(height));
  }
}

std::size_t area(int width, int height) {
  return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
}

// Source coordinate and neighbour pair for one output index.
struct Tap {
  int lo;
  int hi;
  double frac;
};

std::vector<Tap> taps(int in, int out) {
  std::vector<Tap> result(static_cast<std::size_t>(out));
  const double scale = static_cast<double>(in) / static_cast<double>(out);
  for (int d = 0; d < out; ++d) {
    double s = (d + 0.5) * scale - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(in - 1));
    const int lo = static_cast<int>(std::floor(s));
    const int hi = std::min(lo + 1, in - 1);
    result[static_cast<std::size_t>(d)] = {lo, hi, s - lo};
  }
  return result;
}

std::uint8_t round_to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

// Resamples `channels` interleaved planes.
std::vector<std::uint8_t> resample(std::span<const std::uint8_t> src, int in_w, int in_h, int channels, int out_w,
                                   int out_h) {
  const auto xs = taps(in_w, out_w);
  const auto ys = taps(in_h, out_h);
  std::vector<std::uint8_t> dst(area(out_w, out_h) * static_cast<std::size_t>(channels));
  const auto at = [&](int x, int y, int c) -> double {
    return src[(static_cast<std::size_t>(y) * in_w + x) * channels + c];
  };
  std::size_t o = 0;
  for (const Tap& ty : ys) {
    for (const Tap& tx : xs) {
      for (int c = 0; c < channels; ++c) {
        const double top = at(tx.lo, ty.lo, c) * (1.0 - tx.frac) + at(tx.hi, ty.lo, c) * tx.frac;
        const double bottom = at(tx.lo, ty.hi, c) * (1.0 - tx.frac) + at(tx.hi, ty.hi, c) * tx.frac;
        dst[o++] = round_to_byte(top * (1.0 - ty.frac) + bottom * ty.frac);
      }
    }
  }
  return dst;
}

}  // namespace

GrayRaster::GrayRaster(int width, int height, std::uint8_t fill) : width_(width), height_(height) {
  require_dims(width, height);
  pixels_.assign(area(width, height), fill);
}

GrayRaster::GrayRaster(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  require_dims(width, height);
  if (pixels_.size() != area(width, height)) {
    throw std::invalid_argument("gray raster expects " + std::to_string(area(width, height)) + " samples, got " +
                                std::to_string(pixels_.size()));
  }
}

std::uint8_t GrayRaster::clamped(int x, int y) const noexcept {
  return (*this)(std::clamp(x, 0, width_ - 1), std::clamp(y, 0, height_ - 1));
}

RgbRaster::RgbRaster(int width, int height, Rgb fill) : width_(width), height_(height) {
  require_dims(width, height);
  data_.resize(3 * area(width, height));
  for (std::size_t i = 0; i < data_.size(); i += 3) {
    data_[i] = fill.r;
    data_[i + 1] = fill.g;
    data_[i + 2] = fill.b;
  }
}

RgbRaster::RgbRaster(int width, int height, std::vector<std::uint8_t> interleaved)
    : width_(width), height_(height), data_(std::move(interleaved)) {
  require_dims(width, height);
  if (data_.size() != 3 * area(width, height)) {
    throw std::invalid_argument("rgb raster expects " + std::to_string(3 * area(width, height)) + " bytes, got " +
                                std::to_string(data_.size()));
  }
}

BinaryMask::BinaryMask(int width, int height, bool fill) : raster_(width, height, fill ? kOn : 0) {}

BinaryMask BinaryMask::from_gray(GrayRaster gray) {
  for (const auto v : gray.pixels()) {
    if (v != 0 && v != kOn) {
      throw std::invalid_argument("binary mask samples must be 0 or 255, found " + std::to_string(v));
    }
  }
  return BinaryMask(std::move(gray));
}

GrayRaster extract_channel(const RgbRaster& img, Channel channel) {
  const auto offset = static_cast<std::size_t>(channel);
  const auto src = img.data();
  std::vector<std::uint8_t> out(img.pixel_count());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = src[3 * i + offset];
  return GrayRaster(img.width(), img.height(), std::move(out));
}

GrayRaster resize_bilinear(const GrayRaster& img, int out_width, int out_height) {
  if (out_width <= 0 || out_height <= 0) throw std::invalid_argument("resize target dimensions must be positive");
  return GrayRaster(out_width, out_height,
                    resample(img.pixels(), img.width(), img.height(), 1, out_width, out_height));
}

RgbRaster resize_bilinear(const RgbRaster& img, int out_width, int out_height) {
  if (out_width <= 0 || out_height <= 0) throw std::invalid_argument("resize target dimensions must be positive");
  return RgbRaster(out_width, out_height, resample(img.data(), img.width(), img.height(), 3, out_width, out_height));
}

BinaryMask threshold(const GrayRaster& img, std::uint8_t t) {
  std::vector<std::uint8_t> out(img.size());
  std::ranges::transform(img.pixels(), out.begin(),
                         [t](std::uint8_t v) -> std::uint8_t { return v > t ? BinaryMask::kOn : 0; });
  return BinaryMask::from_gray(GrayRaster(img.width(), img.height(), std::move(out)));
}

GrayRaster invert(const GrayRaster& img) {
  GrayRaster out = img;
  for (auto& v : out.pixels()) v = static_cast<std::uint8_t>(255 - v);
  return out;
}

GrayRaster subtract_saturating(const GrayRaster& a, const GrayRaster& b) {
  if (!same_shape(a, b)) throw std::invalid_argument("subtract_saturating: dimension mismatch");
  GrayRaster out(a.width(), a.height());
  const auto pa = a.pixels();
  const auto pb = b.pixels();
  auto po = out.pixels();
  for (std::size_t i = 0; i < po.size(); ++i) {
    po[i] = pa[i] > pb[i] ? static_cast<std::uint8_t>(pa[i] - pb[i]) : 0;
  }
  return out;
}

std::size_t count_nonzero(const BinaryMask& mask) noexcept {
  return static_cast<std::size_t>(std::ranges::count(mask.pixels(), BinaryMask::kOn));
}

}  // namespace fundus
