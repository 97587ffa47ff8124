#include "fundus/enhance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace fundus {

namespace {

using Lut = std::array<std::uint8_t, 256>;

// Start offset of tile t out of n tiles along an axis of `extent` pixels.
int tile_start(int t, int n, int extent) { return t * (extent / n); }

int tile_end(int t, int n, int extent) { return t == n - 1 ? extent : (t + 1) * (extent / n); }

Lut tile_lut(const GrayRaster& img, int x0, int x1, int y0, int y1, double clip_limit) {
  Histogram hist{};
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) ++hist[img(x, y)];
  }
  const auto n = static_cast<std::uint64_t>(x1 - x0) * static_cast<std::uint64_t>(y1 - y0);

  Lut lut{};
  const auto occupied = std::ranges::count_if(hist, [](std::uint64_t c) { return c != 0; });
  if (occupied <= 1) {
    for (int v = 0; v < 256; ++v) lut[v] = static_cast<std::uint8_t>(v);
    return lut;
  }

  const double scaled = clip_limit * static_cast<double>(n) / 256.0;
  const auto clip = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::floor(scaled + 0.5)));
  std::uint64_t excess = 0;
  for (auto& c : hist) {
    if (c > clip) {
      excess += c - clip;
      c = clip;
    }
  }
  const std::uint64_t uniform = excess / 256;
  const std::uint64_t remainder = excess % 256;
  for (std::size_t v = 0; v < 256; ++v) hist[v] += uniform + (v < remainder ? 1 : 0);

  std::uint64_t cdf = 0;
  std::uint64_t cdf_min = 0;
  std::array<std::uint64_t, 256> cdfs{};
  for (std::size_t v = 0; v < 256; ++v) {
    cdf += hist[v];
    cdfs[v] = cdf;
    if (cdf_min == 0 && cdf != 0) cdf_min = cdf;
  }
  const std::uint64_t span = n - cdf_min;
  for (std::size_t v = 0; v < 256; ++v) {
    if (span == 0) {
      lut[v] = static_cast<std::uint8_t>(v);
      continue;
    }
    const std::uint64_t above = cdfs[v] >= cdf_min ? cdfs[v] - cdf_min : 0;
    // round-half-up of 255 * above / span in exact integer arithmetic.
    lut[v] = static_cast<std::uint8_t>(std::min<std::uint64_t>(255, (2 * 255 * above + span) / (2 * span)));
  }
  return lut;
}

// Neighbouring tile indices and blend weight for one coordinate.
struct Blend {
  int lo;
  int hi;
  double w;
};

std::vector<Blend> blends(int extent, int tiles) {
  std::vector<double> centers(static_cast<std::size_t>(tiles));
  for (int t = 0; t < tiles; ++t) {
    const int s = tile_start(t, tiles, extent);
    const int e = tile_end(t, tiles, extent);
    centers[static_cast<std::size_t>(t)] = (s + e - 1) / 2.0;
  }
  std::vector<Blend> out(static_cast<std::size_t>(extent));
  for (int p = 0; p < extent; ++p) {
    Blend b{0, 0, 0.0};
    if (p <= centers.front()) {
      b = {0, 0, 0.0};
    } else if (p >= centers.back()) {
      b = {tiles - 1, tiles - 1, 0.0};
    } else {
      int t = 0;
      while (p >= centers[static_cast<std::size_t>(t + 1)]) ++t;
      const double c0 = centers[static_cast<std::size_t>(t)];
      const double c1 = centers[static_cast<std::size_t>(t + 1)];
      b = {t, t + 1, (p - c0) / (c1 - c0)};
    }
    out[static_cast<std::size_t>(p)] = b;
  }
  return out;
}

GrayRaster pad_to(const GrayRaster& img, int width, int height) {
  GrayRaster out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) out(x, y) = img.clamped(x, y);
  }
  return out;
}

GrayRaster clahe_impl(const GrayRaster& img, const ClaheParams& p) {
  const int tx = p.tiles_x;
  const int ty = p.tiles_y;
  std::vector<Lut> luts(static_cast<std::size_t>(tx * ty));
  for (int j = 0; j < ty; ++j) {
    for (int i = 0; i < tx; ++i) {
      luts[static_cast<std::size_t>(j * tx + i)] =
          tile_lut(img, tile_start(i, tx, img.width()), tile_end(i, tx, img.width()), tile_start(j, ty, img.height()),
                   tile_end(j, ty, img.height()), p.clip_limit);
    }
  }
  const auto bx = blends(img.width(), tx);
  const auto by = blends(img.height(), ty);
  GrayRaster out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    const Blend& v = by[static_cast<std::size_t>(y)];
    for (int x = 0; x < img.width(); ++x) {
      const Blend& h = bx[static_cast<std::size_t>(x)];
      const std::uint8_t s = img(x, y);
      const double m00 = luts[static_cast<std::size_t>(v.lo * tx + h.lo)][s];
      const double m10 = luts[static_cast<std::size_t>(v.lo * tx + h.hi)][s];
      const double m01 = luts[static_cast<std::size_t>(v.hi * tx + h.lo)][s];
      const double m11 = luts[static_cast<std::size_t>(v.hi * tx + h.hi)][s];
      const double top = m00 * (1.0 - h.w) + m10 * h.w;
      const double bottom = m01 * (1.0 - h.w) + m11 * h.w;
      const double value = top * (1.0 - v.w) + bottom * v.w;
      out(x, y) = static_cast<std::uint8_t>(std::clamp(std::floor(value + 0.5), 0.0, 255.0));
    }
  }
  return out;
}

}  // namespace

Histogram histogram(const GrayRaster& img, const BinaryMask* mask) {
  Histogram hist{};
  const auto px = img.pixels();
  if (mask == nullptr) {
    for (const auto v : px) ++hist[v];
    return hist;
  }
  if (!same_shape(img, *mask)) throw std::invalid_argument("histogram: mask dimensions differ from image");
  const auto m = mask->pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    if (m[i] != 0) ++hist[px[i]];
  }
  return hist;
}

void ClaheParams::validate() const {
  if (tiles_x < 1 || tiles_y < 1) throw std::invalid_argument("CLAHE tile grid must be at least 1x1");
  if (!(clip_limit >= 1.0) || !std::isfinite(clip_limit)) {
    throw std::invalid_argument("CLAHE clip limit must be a finite value >= 1.0");
  }
}

GrayRaster clahe(const GrayRaster& img, const ClaheParams& params) {
  params.validate();
  if (img.width() >= params.tiles_x && img.height() >= params.tiles_y) return clahe_impl(img, params);
  const GrayRaster padded =
      clahe_impl(pad_to(img, std::max(img.width(), params.tiles_x), std::max(img.height(), params.tiles_y)), params);
  GrayRaster out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) out(x, y) = padded(x, y);
  }
  return out;
}

std::optional<std::uint8_t> otsu_threshold(const Histogram& hist) {
  const auto occupied = std::ranges::count_if(hist, [](std::uint64_t c) { return c != 0; });
  if (occupied < 2) return std::nullopt;
  std::uint64_t total = 0;
  std::uint64_t total_sum = 0;
  for (std::size_t v = 0; v < 256; ++v) {
    total += hist[v];
    total_sum += hist[v] * v;
  }
  // Between-class variance up to the constant 1/total^2: (n1*s0 - n0*s1)^2 / (n0*n1).
  // Thresholds separated only by empty bins see identical integer inputs, so
  // their scores tie exactly and the strict comparison keeps the lowest.
  long double best = -1.0L;
  int best_t = 0;
  std::uint64_t n0 = 0;
  std::uint64_t s0 = 0;
  for (int t = 0; t < 255; ++t) {
    n0 += hist[static_cast<std::size_t>(t)];
    s0 += hist[static_cast<std::size_t>(t)] * static_cast<std::uint64_t>(t);
    const std::uint64_t n1 = total - n0;
    if (n0 == 0 || n1 == 0) continue;
    const std::uint64_t s1 = total_sum - s0;
    const long double diff = static_cast<long double>(n1) * static_cast<long double>(s0) -
                             static_cast<long double>(n0) * static_cast<long double>(s1);
    const long double score = diff * diff / (static_cast<long double>(n0) * static_cast<long double>(n1));
    if (score > best) {
      best = score;
      best_t = t;
    }
  }
  return static_cast<std::uint8_t>(best_t);
}

GrayRaster median_filter(const GrayRaster& img, int k) {
  if (k < 1 || k % 2 == 0) throw std::invalid_argument("median window must be odd and >= 1, got " + std::to_string(k));
  if (k == 1) return img;
  const int r = k / 2;
  GrayRaster out(img.width(), img.height());
  // Running histogram along each row (Huang's algorithm); the median is the
  // element at index k*k/2 of the sorted window.
  const int rank = (k * k) / 2;
  for (int y = 0; y < img.height(); ++y) {
    std::array<int, 256> hist{};
    for (int dy = -r; dy <= r; ++dy) {
      for (int dx = -r; dx <= r; ++dx) ++hist[img.clamped(dx, y + dy)];
    }
    for (int x = 0; x < img.width(); ++x) {
      if (x > 0) {
        for (int dy = -r; dy <= r; ++dy) {
          --hist[img.clamped(x - r - 1, y + dy)];
          ++hist[img.clamped(x + r, y + dy)];
        }
      }
      int seen = 0;
      int v = 0;
      for (; v < 256; ++v) {
        seen += hist[static_cast<std::size_t>(v)];
        if (seen > rank) break;
      }
      out(x, y) = static_cast<std::uint8_t>(v);
    }
  }
  return out;
}

}  // namespace fundus
