#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "fundus/lesions.hpp"
#include "fundus/raster.hpp"

namespace fundus {

/// Raw, central and scale-normalized moments up to order 3 plus the seven Hu
/// invariants. Indexing is [p][q] for x^p y^q; x is the column, y the row.
/// Everything is zero when the total weight m00 is zero.
struct Moments {
  std::array<std::array<double, 4>, 4> raw{};
  std::array<std::array<double, 4>, 4> central{};
  std::array<std::array<double, 4>, 4> normalized{};
  std::array<double, 7> hu{};
  double centroid_x = 0.0;
  double centroid_y = 0.0;
};

/// Pixel intensities are the weights. Central moments are accumulated from
/// exact integer sums about the centroid, so integer translations and
/// quarter-turn rotations reproduce the Hu invariants bit for bit.
Moments moments(const GrayRaster& img);
Moments moments(const BinaryMask& mask);

/// First Hu invariant (eta20 + eta02) of the lesion mask.
double zeroth_hu(const LesionResult& lesion);

/// Green intensities under the mask pooled into `bins` equal-width bins and
/// normalized by the number of set pixels; all zeros for an empty mask.
/// `bins` must divide 256.
std::vector<double> masked_histogram_feature(const GrayRaster& gray, const BinaryMask& mask, int bins = 32);

/// Number of features produced for a given histogram bin count.
constexpr std::size_t feature_dimension(int bins = 32) noexcept { return 3 * (static_cast<std::size_t>(bins) + 1); }

/// Flattened as [exudate hist, exudate hu, vessel hist, vessel hu, ma hist, ma hu].
using FeatureVector = std::vector<double>;

FeatureVector assemble_features(const LesionResult& exudate, const LesionResult& vessel, const LesionResult& ma,
                                const GrayRaster& green, int bins = 32);

/// Dense row-major sample matrix.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  explicit FeatureMatrix(std::size_t cols) : cols_(cols) {}
  FeatureMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0; }

  std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }

  /// Appends a row; throws std::invalid_argument on a width mismatch.
  void push_row(std::span<const double> values);

  /// Rows selected by index, in the given order.
  FeatureMatrix select(std::span<const std::size_t> indices) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Column means and population standard deviations.
struct ScalerModel {
  std::vector<double> mean;
  std::vector<double> stddev;

  std::size_t dimension() const noexcept { return mean.size(); }
};

ScalerModel scaler_fit(const FeatureMatrix& x);

/// (x - mean) / stddev; columns with zero deviation map to 0.
std::vector<double> scaler_transform(const ScalerModel& model, std::span<const double> x);
FeatureMatrix scaler_transform(const ScalerModel& model, const FeatureMatrix& x);

}  // namespace fundus
