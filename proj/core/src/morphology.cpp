#include "fundus/morphology.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace fundus {

StructuringElement::StructuringElement(int width, int height, std::vector<bool> footprint)
    : width_(width), height_(height), footprint_(std::move(footprint)) {
  if (width < 1 || height < 1 || width % 2 == 0 || height % 2 == 0) {
    throw std::invalid_argument("structuring element dimensions must be odd and positive");
  }
  if (footprint_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw std::invalid_argument("structuring element footprint size mismatch");
  }
  const int cx = (width - 1) / 2;
  const int cy = (height - 1) / 2;
  if (!contains(cx, cy)) throw std::invalid_argument("structuring element anchor cell must be set");
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      if (contains(c, r)) offsets_.push_back({c - cx, r - cy});
    }
  }
}

bool StructuringElement::symmetric() const noexcept {
  for (int r = 0; r < height_; ++r) {
    for (int c = 0; c < width_; ++c) {
      if (contains(c, r) != contains(width_ - 1 - c, height_ - 1 - r)) return false;
    }
  }
  return true;
}

int promoted_se_size(int size) { return size % 2 == 0 ? size + 1 : size; }

StructuringElement ellipse_se(int width, int height) {
  if (width < 1 || height < 1) throw std::invalid_argument("ellipse_se: dimensions must be positive");
  const int w = promoted_se_size(width);
  const int h = promoted_se_size(height);
  // Doubled coordinates keep the inclusion test in exact integers:
  // (2dc/A)^2 + (2dr/B)^2 <= 1 with A = max(w-1,1), B = max(h-1,1).
  const std::int64_t a2 = std::max(w - 1, 1);
  const std::int64_t b2 = std::max(h - 1, 1);
  std::vector<bool> cells(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::int64_t dc = 2 * c - (w - 1);
      const std::int64_t dr = 2 * r - (h - 1);
      cells[static_cast<std::size_t>(r) * w + c] = dc * dc * b2 * b2 + dr * dr * a2 * a2 <= a2 * a2 * b2 * b2;
    }
  }
  return StructuringElement(w, h, std::move(cells));
}

namespace {

// Rank operator over `offsets` read from an edge-replicated halo copy.
template <typename Pick>
GrayRaster rank_filter(const GrayRaster& img, std::span<const Offset> offsets, Pick pick, std::uint8_t identity) {
  int rx = 0;
  int ry = 0;
  for (const auto& o : offsets) {
    rx = std::max(rx, std::abs(o.dx));
    ry = std::max(ry, std::abs(o.dy));
  }
  const int pw = img.width() + 2 * rx;
  const int ph = img.height() + 2 * ry;
  std::vector<std::uint8_t> padded(static_cast<std::size_t>(pw) * static_cast<std::size_t>(ph));
  for (int y = 0; y < ph; ++y) {
    for (int x = 0; x < pw; ++x) padded[static_cast<std::size_t>(y) * pw + x] = img.clamped(x - rx, y - ry);
  }
  std::vector<std::ptrdiff_t> deltas;
  deltas.reserve(offsets.size());
  for (const auto& o : offsets) deltas.push_back(static_cast<std::ptrdiff_t>(o.dy) * pw + o.dx);

  GrayRaster out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    const std::uint8_t* row = padded.data() + static_cast<std::size_t>(y + ry) * pw + rx;
    for (int x = 0; x < img.width(); ++x) {
      const std::uint8_t* center = row + x;
      std::uint8_t acc = identity;
      for (const auto d : deltas) acc = pick(acc, center[d]);
      out(x, y) = acc;
    }
  }
  return out;
}

}  // namespace

GrayRaster erode(const GrayRaster& img, const StructuringElement& se) {
  return rank_filter(
      img, se.offsets(), [](std::uint8_t a, std::uint8_t b) { return std::min(a, b); }, 255);
}

GrayRaster dilate(const GrayRaster& img, const StructuringElement& se) {
  std::vector<Offset> reflected;
  reflected.reserve(se.cell_count());
  for (const auto& o : se.offsets()) reflected.push_back({-o.dx, -o.dy});
  return rank_filter(
      img, reflected, [](std::uint8_t a, std::uint8_t b) { return std::max(a, b); }, 0);
}

GrayRaster open(const GrayRaster& img, const StructuringElement& se) { return dilate(erode(img, se), se); }

GrayRaster close(const GrayRaster& img, const StructuringElement& se) { return erode(dilate(img, se), se); }

GrayRaster alternate_sequential_filter(const GrayRaster& img, std::span<const StructuringElement> ses) {
  if (ses.empty()) throw std::invalid_argument("alternate_sequential_filter: at least one structuring element required");
  GrayRaster out = img;
  for (const auto& se : ses) out = close(open(out, se), se);
  return out;
}

}  // namespace fundus
