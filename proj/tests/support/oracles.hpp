#pragma once

// Straightforward reference implementations used to cross-check the library.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fundus/raster.hpp"

namespace fundus::testing {

/// Boolean footprint, anchor at the centre.
struct Footprint {
  int w;
  int h;
  std::vector<bool> cells;  // row-major

  bool at(int c, int r) const { return cells[static_cast<std::size_t>(r) * w + c]; }
};

/// Filled ellipse inscribed in a w x h box, tested in floating point.
Footprint ellipse_footprint(int w, int h);

/// Minimum over the footprint with edge-replicated reads.
GrayRaster erode_oracle(const GrayRaster& img, const Footprint& fp);
/// Maximum over the reflected footprint with edge-replicated reads.
GrayRaster dilate_oracle(const GrayRaster& img, const Footprint& fp);

/// Element of rank k*k/2 in the sorted k x k neighbourhood, edge-replicated.
GrayRaster median_oracle(const GrayRaster& img, int k);

/// Global histogram equalization: v -> round(255 (cdf(v) - cdf_min) / (N - cdf_min)).
GrayRaster global_equalize_oracle(const GrayRaster& img);

/// Flood-fill component sizes and the pixel label of every pixel (0 = off).
struct FloodLabels {
  std::vector<int> label;          // per pixel
  std::vector<std::size_t> sizes;  // index label-1
};
FloodLabels flood_fill_oracle(const BinaryMask& mask, int connectivity);

/// Mask keeping the flood-fill components whose areas lie within [lo, hi].
BinaryMask area_filter_oracle(const BinaryMask& mask, std::size_t lo, std::size_t hi, int connectivity);

/// Between-class variance of splitting the histogram at t, computed directly.
double otsu_score_oracle(const std::vector<std::uint64_t>& hist, int t);

}  // namespace fundus::testing
