#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "fundus/enhance.hpp"
#include "fundus/raster.hpp"
#include "fundus/regions.hpp"

namespace fundus {

enum class LesionKind { Exudate, Vessel, Microaneurysm };

std::string_view to_string(LesionKind kind) noexcept;

struct LesionResult {
  BinaryMask mask;
  std::size_t area = 0;             // == count_nonzero(mask)
  std::size_t component_count = 0;  // 8-connected components of mask
  LesionKind kind = LesionKind::Exudate;
};

/// Builds a result, deriving area and component count from the mask.
LesionResult make_lesion_result(BinaryMask mask, LesionKind kind);

/// Tunables of the three segmentation recipes. Structuring element sizes are
/// requested sizes; even values are promoted to the next odd size.
struct LesionParams {
  ClaheParams clahe{};
  int median_k = 5;

  double disc_percentile = 99.5;
  int disc_dilate = 25;

  int exudate_dilate = 6;
  std::uint8_t exudate_threshold = 235;

  std::vector<int> vessel_se = {5, 11, 23};
  std::uint8_t vessel_threshold = 15;
  std::size_t vessel_min_area = 200;
  std::size_t vessel_max_area = kUnboundedArea;

  int ma_erode = 7;
  int ma_close = 5;
  std::size_t ma_min_area = 5;
  std::size_t ma_max_area = 150;

  Connectivity connectivity = Connectivity::Eight;

  /// Throws std::invalid_argument describing the first bad field.
  void validate() const;
};

/// Receives intermediate images, e.g. for --dump-stages. Stage names are
/// stable identifiers such as "vessel.asf".
using StageSink = std::function<void(std::string_view stage, const GrayRaster& image)>;

/// Green channel with the optic disc painted over: red pixels at or above the
/// disc_percentile cut (nearest rank) form the disc seed, which is dilated by
/// an ellipse of disc_dilate and filled with the median red intensity. When every
/// pixel reaches the cut (e.g. a flat red channel) the green channel is
/// returned unchanged.
GrayRaster remove_optic_disc(const RgbRaster& img, const LesionParams& params = {}, const StageSink& sink = {});

/// disc removal -> dilate -> median -> threshold.
LesionResult detect_exudates(const RgbRaster& img, const LesionParams& params = {}, const StageSink& sink = {});

/// green -> CLAHE -> alternate sequential filter -> (enhanced - filtered) ->
/// threshold -> area filter.
LesionResult detect_vessels(const RgbRaster& img, const LesionParams& params = {}, const StageSink& sink = {});

/// green -> CLAHE -> median -> erode -> invert -> close -> Otsu -> area band.
LesionResult detect_microaneurysms(const RgbRaster& img, const LesionParams& params = {}, const StageSink& sink = {});

struct LesionSet {
  LesionResult exudate;
  LesionResult vessel;
  LesionResult microaneurysm;
};

LesionSet detect_all(const RgbRaster& img, const LesionParams& params = {}, const StageSink& sink = {});

}  // namespace fundus
