#pragma once

#include <span>
#include <vector>

#include "fundus/raster.hpp"

namespace fundus {

/// Offset of a set footprint cell relative to the anchor.
struct Offset {
  int dx;
  int dy;
  friend bool operator==(const Offset&, const Offset&) = default;
};

/// Flat structuring element with odd dimensions, anchored at its center.
class StructuringElement {
 public:
  /// `footprint` is row-major, width * height cells. Dimensions must be odd,
  /// the anchor cell must be set.
  StructuringElement(int width, int height, std::vector<bool> footprint);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool contains(int col, int row) const noexcept {
    return footprint_[static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(col)];
  }
  std::span<const Offset> offsets() const noexcept { return offsets_; }
  std::size_t cell_count() const noexcept { return offsets_.size(); }

  /// True when the footprint equals its point reflection.
  bool symmetric() const noexcept;

  friend bool operator==(const StructuringElement& a, const StructuringElement& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.footprint_ == b.footprint_;
  }

 private:
  int width_;
  int height_;
  std::vector<bool> footprint_;
  std::vector<Offset> offsets_;
};

/// Elliptical element: cell (r, c) is set iff ((c-cx)/a)^2 + ((r-cy)/b)^2 <= 1
/// with cx = (w-1)/2, a = max(w-1, 1)/2 and likewise for rows. Even sizes are
/// promoted to the next odd size (6 -> 7) so the anchor is a real cell.
StructuringElement ellipse_se(int width, int height);

/// The size ellipse_se actually builds for a requested extent.
int promoted_se_size(int size);

/// Minimum over the footprint, edge-replicated at the borders.
GrayRaster erode(const GrayRaster& img, const StructuringElement& se);
/// Maximum over the reflected footprint, edge-replicated at the borders.
GrayRaster dilate(const GrayRaster& img, const StructuringElement& se);
GrayRaster open(const GrayRaster& img, const StructuringElement& se);
GrayRaster close(const GrayRaster& img, const StructuringElement& se);

/// One opening then one closing per element, in the order given (small to large).
GrayRaster alternate_sequential_filter(const GrayRaster& img, std::span<const StructuringElement> ses);

}  // namespace fundus
