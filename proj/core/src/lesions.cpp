#include "fundus/lesions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fundus/morphology.hpp"

namespace fundus {

namespace {

void emit(const StageSink& sink, std::string_view stage, const GrayRaster& img) {
  if (sink) sink(stage, img);
}

// Smallest value v with at least ceil(fraction * n) samples <= v.
std::uint8_t nearest_rank(const Histogram& hist, std::uint64_t n, double fraction) {
  const auto rank = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(fraction * static_cast<double>(n))));
  std::uint64_t seen = 0;
  for (std::size_t v = 0; v < 256; ++v) {
    seen += hist[v];
    if (seen >= rank) return static_cast<std::uint8_t>(v);
  }
  return 255;
}

// Sample at index n/2 of the sorted values, matching the median filter's rank.
std::uint8_t median_value(const Histogram& hist, std::uint64_t n) {
  std::uint64_t seen = 0;
  for (std::size_t v = 0; v < 256; ++v) {
    seen += hist[v];
    if (seen > n / 2) return static_cast<std::uint8_t>(v);
  }
  return 255;
}

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

}  // namespace

std::string_view to_string(LesionKind kind) noexcept {
  switch (kind) {
    case LesionKind::Exudate:
      return "exudate";
    case LesionKind::Vessel:
      return "vessel";
    case LesionKind::Microaneurysm:
      return "ma";
  }
  return "unknown";
}

LesionResult make_lesion_result(BinaryMask mask, LesionKind kind) {
  LesionResult r;
  r.area = count_nonzero(mask);
  r.component_count = connected_components(mask, Connectivity::Eight).size();
  r.mask = std::move(mask);
  r.kind = kind;
  return r;
}

void LesionParams::validate() const {
  clahe.validate();
  require(median_k >= 1 && median_k % 2 == 1, "median window must be odd and >= 1");
  require(disc_percentile > 0.0 && disc_percentile <= 100.0, "disc percentile must lie in (0, 100]");
  require(disc_dilate >= 1, "disc dilation size must be >= 1");
  require(exudate_dilate >= 1, "exudate dilation size must be >= 1");
  require(!vessel_se.empty(), "vessel filter needs at least one structuring element");
  for (const int s : vessel_se) require(s >= 1, "vessel structuring element sizes must be >= 1");
  require(vessel_min_area <= vessel_max_area, "vessel area band is empty");
  require(ma_erode >= 1 && ma_close >= 1, "microaneurysm structuring element sizes must be >= 1");
  require(ma_min_area <= ma_max_area, "microaneurysm area band is empty");
}

GrayRaster remove_optic_disc(const RgbRaster& img, const LesionParams& params, const StageSink& sink) {
  const GrayRaster red = extract_channel(img, Channel::Red);
  GrayRaster working = extract_channel(img, Channel::Green);
  const Histogram hist = histogram(red);
  const std::uint64_t n = red.size();
  const std::uint8_t cut = nearest_rank(hist, n, params.disc_percentile / 100.0);
  // Pixels at or above the cut seed the disc. A seed covering the whole frame
  // means nothing stands out, which is treated as no disc.
  const BinaryMask seed = cut == 0 ? BinaryMask(red.width(), red.height(), true) : threshold(red, cut - 1);
  if (count_nonzero(seed) == n) {
    emit(sink, "disc.removed", working);
    return working;
  }
  const GrayRaster disc = dilate(seed.gray(), ellipse_se(params.disc_dilate, params.disc_dilate));
  emit(sink, "disc.mask", disc);
  const std::uint8_t fill = median_value(hist, n);
  auto px = working.pixels();
  const auto dm = disc.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    if (dm[i] != 0) px[i] = fill;
  }
  emit(sink, "disc.removed", working);
  return working;
}

LesionResult detect_exudates(const RgbRaster& img, const LesionParams& params, const StageSink& sink) {
  const GrayRaster working = remove_optic_disc(img, params, sink);
  const GrayRaster dilated = dilate(working, ellipse_se(params.exudate_dilate, params.exudate_dilate));
  emit(sink, "exudate.dilated", dilated);
  const GrayRaster smoothed = median_filter(dilated, params.median_k);
  emit(sink, "exudate.median", smoothed);
  BinaryMask mask = threshold(smoothed, params.exudate_threshold);
  emit(sink, "exudate.mask", mask.gray());
  return make_lesion_result(std::move(mask), LesionKind::Exudate);
}

LesionResult detect_vessels(const RgbRaster& img, const LesionParams& params, const StageSink& sink) {
  const GrayRaster enhanced = clahe(extract_channel(img, Channel::Green), params.clahe);
  emit(sink, "vessel.clahe", enhanced);
  std::vector<StructuringElement> ses;
  ses.reserve(params.vessel_se.size());
  for (const int s : params.vessel_se) ses.push_back(ellipse_se(s, s));
  const GrayRaster background = alternate_sequential_filter(enhanced, ses);
  emit(sink, "vessel.asf", background);
  const GrayRaster residual = subtract_saturating(enhanced, background);
  emit(sink, "vessel.residual", residual);
  const BinaryMask binary = threshold(residual, params.vessel_threshold);
  emit(sink, "vessel.binary", binary.gray());
  BinaryMask mask =
      filter_components_by_area(binary, params.vessel_min_area, params.vessel_max_area, params.connectivity);
  emit(sink, "vessel.mask", mask.gray());
  return make_lesion_result(std::move(mask), LesionKind::Vessel);
}

LesionResult detect_microaneurysms(const RgbRaster& img, const LesionParams& params, const StageSink& sink) {
  const GrayRaster enhanced = clahe(extract_channel(img, Channel::Green), params.clahe);
  emit(sink, "ma.clahe", enhanced);
  const GrayRaster smoothed = median_filter(enhanced, params.median_k);
  emit(sink, "ma.median", smoothed);
  const GrayRaster eroded = erode(smoothed, ellipse_se(params.ma_erode, params.ma_erode));
  emit(sink, "ma.eroded", eroded);
  const GrayRaster inverted = invert(eroded);
  emit(sink, "ma.inverted", inverted);
  const GrayRaster closed = close(inverted, ellipse_se(params.ma_close, params.ma_close));
  emit(sink, "ma.closed", closed);
  const auto cut = otsu_threshold(histogram(closed));
  const BinaryMask binary = cut ? threshold(closed, *cut) : BinaryMask(img.width(), img.height());
  emit(sink, "ma.binary", binary.gray());
  BinaryMask mask = filter_components_by_area(binary, params.ma_min_area, params.ma_max_area, params.connectivity);
  emit(sink, "ma.mask", mask.gray());
  return make_lesion_result(std::move(mask), LesionKind::Microaneurysm);
}

LesionSet detect_all(const RgbRaster& img, const LesionParams& params, const StageSink& sink) {
  return {detect_exudates(img, params, sink), detect_vessels(img, params, sink),
          detect_microaneurysms(img, params, sink)};
}

}  // namespace fundus
