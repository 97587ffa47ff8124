#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "fundus/raster.hpp"

namespace fundus {

using Histogram = std::array<std::uint64_t, 256>;

/// Intensity counts of the pixels selected by `mask` (all pixels when absent).
Histogram histogram(const GrayRaster& img, const BinaryMask* mask = nullptr);

struct ClaheParams {
  int tiles_x = 8;
  int tiles_y = 8;
  /// Relative clip; the per-bin clip for a tile of N pixels is
  /// max(1, round(clip_limit * N / 256)).
  double clip_limit = 2.0;

  void validate() const;
};

/// Contrast-limited adaptive histogram equalization.
///
/// The image is cut into tiles_x * tiles_y tiles (the last row and column of
/// tiles absorb the remainder). Each tile histogram is clipped, the excess is
/// spread uniformly with the leftover counts going one each to bins 0, 1, ...,
/// and a CDF lookup table is built. A tile whose pixels all share one value
/// maps to itself. Output pixels blend the lookup tables of the surrounding
/// tile centers bilinearly, clamping outside the outermost centers. Images
/// smaller than the tile grid are edge-replicated up to it first.
GrayRaster clahe(const GrayRaster& img, const ClaheParams& params = {});

/// Otsu's threshold: the t maximizing between-class variance when splitting
/// into {<= t} and {> t}; the lowest such t wins ties. Returns nullopt when the
/// histogram has fewer than two occupied bins.
std::optional<std::uint8_t> otsu_threshold(const Histogram& hist);

/// k x k median with edge replication; k must be odd and >= 1.
GrayRaster median_filter(const GrayRaster& img, int k);

}  // namespace fundus
