#include "fundus/features.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace fundus {

namespace {

__extension__ typedef __int128 Wide;

struct Sample {
  int x;
  int y;
  std::int64_t w;
};

// Hu's seven invariants. Every product pairs one factor from {a, c} with one
// from {b, d} (see below) so that a quarter turn, which maps
// (a, b, c, d) -> (c, -d, -a, b), permutes terms without changing rounding.
std::array<double, 7> hu_invariants(const std::array<std::array<double, 4>, 4>& n) {
  const double n20 = n[2][0], n02 = n[0][2], n11 = n[1][1];
  const double n30 = n[3][0], n03 = n[0][3], n21 = n[2][1], n12 = n[1][2];
  const double a = n30 - 3.0 * n12;
  const double b = n30 + n12;
  const double c = 3.0 * n21 - n03;
  const double d = n21 + n03;
  const double b2 = b * b;
  const double d2 = d * d;
  const double diff = n20 - n02;
  std::array<double, 7> hu{};
  hu[0] = n20 + n02;
  hu[1] = diff * diff + 4.0 * (n11 * n11);
  hu[2] = a * a + c * c;
  hu[3] = b2 + d2;
  hu[4] = (a * b) * (b2 - 3.0 * d2) + (c * d) * (3.0 * b2 - d2);
  hu[5] = diff * (b2 - d2) + (4.0 * n11) * (b * d);
  hu[6] = (c * b) * (b2 - 3.0 * d2) - (a * d) * (3.0 * b2 - d2);
  return hu;
}

void normalize(Moments& m) {
  const double m00 = m.raw[0][0];
  for (int p = 0; p <= 3; ++p) {
    for (int q = 0; p + q <= 3; ++q) {
      if (p + q < 2) continue;
      const double scale = p + q == 2 ? m00 * m00 : std::pow(m00, 2.5);
      m.normalized[p][q] = m.central[p][q] / scale;
    }
  }
  m.normalized[0][0] = 1.0;
  m.hu = hu_invariants(m.normalized);
}

Moments from_samples(const std::vector<Sample>& samples, int width, int height) {
  Moments m;
  if (samples.empty()) return m;

  std::int64_t g = 0;
  for (const auto& s : samples) g = std::gcd(g, s.w);

  Wide sums[4][4] = {};
  for (const auto& s : samples) {
    const std::int64_t w = s.w / g;
    Wide xp = 1;
    for (int p = 0; p <= 3; ++p) {
      Wide term = xp * w;
      for (int q = 0; p + q <= 3; ++q) {
        sums[p][q] += term;
        term *= s.y;
      }
      xp *= s.x;
    }
  }
  const auto s00 = static_cast<std::int64_t>(sums[0][0]);
  const auto s10 = static_cast<std::int64_t>(sums[1][0]);
  const auto s01 = static_cast<std::int64_t>(sums[0][1]);
  const double gd = static_cast<double>(g);
  for (int p = 0; p <= 3; ++p) {
    for (int q = 0; p + q <= 3; ++q) m.raw[p][q] = gd * static_cast<double>(sums[p][q]);
  }
  m.centroid_x = static_cast<double>(s10) / static_cast<double>(s00);
  m.centroid_y = static_cast<double>(s01) / static_cast<double>(s00);
  m.central[0][0] = m.raw[0][0];

  // Sum over w * (s00*x - s10)^p (s00*y - s01)^q is bounded by
  // s00 * (s00 * extent)^3; take the exact integer route while it fits.
  const long double extent = std::max(width, height);
  const long double bound = std::pow(static_cast<long double>(s00), 4.0L) * extent * extent * extent;
  if (bound < std::ldexp(1.0L, 125)) {
    Wide c[4][4] = {};
    for (const auto& s : samples) {
      const std::int64_t w = s.w / g;
      const Wide dx = static_cast<Wide>(s00) * s.x - s10;
      const Wide dy = static_cast<Wide>(s00) * s.y - s01;
      c[2][0] += w * dx * dx;
      c[0][2] += w * dy * dy;
      c[1][1] += w * dx * dy;
      c[3][0] += w * dx * dx * dx;
      c[0][3] += w * dy * dy * dy;
      c[2][1] += w * dx * dx * dy;
      c[1][2] += w * dx * dy * dy;
    }
    for (int p = 0; p <= 3; ++p) {
      for (int q = 0; p + q <= 3; ++q) {
        if (p + q < 2) continue;
        const long double denom = std::pow(static_cast<long double>(s00), p + q);
        m.central[p][q] = static_cast<double>(gd * (static_cast<long double>(c[p][q]) / denom));
      }
    }
  } else {
    long double c[4][4] = {};
    const long double cx = static_cast<long double>(s10) / s00;
    const long double cy = static_cast<long double>(s01) / s00;
    for (const auto& s : samples) {
      const long double w = static_cast<long double>(s.w);
      const long double dx = s.x - cx;
      const long double dy = s.y - cy;
      c[2][0] += w * dx * dx;
      c[0][2] += w * dy * dy;
      c[1][1] += w * dx * dy;
      c[3][0] += w * dx * dx * dx;
      c[0][3] += w * dy * dy * dy;
      c[2][1] += w * dx * dx * dy;
      c[1][2] += w * dx * dy * dy;
    }
    for (int p = 0; p <= 3; ++p) {
      for (int q = 0; p + q <= 3; ++q) {
        if (p + q >= 2) m.central[p][q] = static_cast<double>(c[p][q]);
      }
    }
  }
  normalize(m);
  return m;
}

}  // namespace

Moments moments(const GrayRaster& img) {
  std::vector<Sample> samples;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (img(x, y) != 0) samples.push_back({x, y, img(x, y)});
    }
  }
  return from_samples(samples, img.width(), img.height());
}

Moments moments(const BinaryMask& mask) { return moments(mask.gray()); }

double zeroth_hu(const LesionResult& lesion) { return moments(lesion.mask).hu[0]; }

std::vector<double> masked_histogram_feature(const GrayRaster& gray, const BinaryMask& mask, int bins) {
  if (bins < 1 || bins > 256 || 256 % bins != 0) {
    throw std::invalid_argument("histogram bin count must divide 256, got " + std::to_string(bins));
  }
  if (!same_shape(gray, mask)) throw std::invalid_argument("masked_histogram_feature: dimension mismatch");
  const int width = 256 / bins;
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(bins));
  std::uint64_t selected = 0;
  const auto px = gray.pixels();
  const auto m = mask.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    if (m[i] == 0) continue;
    ++counts[static_cast<std::size_t>(px[i] / width)];
    ++selected;
  }
  std::vector<double> out(static_cast<std::size_t>(bins), 0.0);
  if (selected == 0) return out;
  for (std::size_t b = 0; b < out.size(); ++b) out[b] = static_cast<double>(counts[b]) / static_cast<double>(selected);
  return out;
}

FeatureVector assemble_features(const LesionResult& exudate, const LesionResult& vessel, const LesionResult& ma,
                                const GrayRaster& green, int bins) {
  FeatureVector out;
  out.reserve(feature_dimension(bins));
  for (const LesionResult* lesion : {&exudate, &vessel, &ma}) {
    const auto hist = masked_histogram_feature(green, lesion->mask, bins);
    out.insert(out.end(), hist.begin(), hist.end());
    out.push_back(zeroth_hu(*lesion));
  }
  return out;
}

void FeatureMatrix::push_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) {
    throw std::invalid_argument("feature row has " + std::to_string(values.size()) + " values, expected " +
                                std::to_string(cols_));
  }
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

FeatureMatrix FeatureMatrix::select(std::span<const std::size_t> indices) const {
  FeatureMatrix out(cols_);
  for (const auto i : indices) out.push_row(row(i));
  return out;
}

ScalerModel scaler_fit(const FeatureMatrix& x) {
  if (x.empty()) throw std::invalid_argument("scaler_fit: no rows");
  const std::size_t d = x.cols();
  const auto n = static_cast<double>(x.rows());
  ScalerModel model{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < d; ++c) model.mean[c] += x(r, c);
  }
  for (auto& m : model.mean) m /= n;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      const double e = x(r, c) - model.mean[c];
      model.stddev[c] += e * e;
    }
  }
  for (auto& s : model.stddev) s = std::sqrt(s / n);
  return model;
}

std::vector<double> scaler_transform(const ScalerModel& model, std::span<const double> x) {
  if (x.size() != model.dimension()) {
    throw std::invalid_argument("scaler_transform: expected " + std::to_string(model.dimension()) +
                                " features, got " + std::to_string(x.size()));
  }
  std::vector<double> out(x.size());
  for (std::size_t c = 0; c < x.size(); ++c) {
    out[c] = model.stddev[c] == 0.0 ? 0.0 : (x[c] - model.mean[c]) / model.stddev[c];
  }
  return out;
}

FeatureMatrix scaler_transform(const ScalerModel& model, const FeatureMatrix& x) {
  FeatureMatrix out(model.dimension());
  for (std::size_t r = 0; r < x.rows(); ++r) out.push_row(scaler_transform(model, x.row(r)));
  return out;
}

}  // namespace fundus
