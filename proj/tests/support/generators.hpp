#pragma once

#include <cstdint>
#include <vector>

#include "fundus/raster.hpp"
#include "fundus/rng.hpp"

namespace fundus::testing {

/// Seeded random inputs for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(Pcg32::derive(seed, 7)) {}

  int int_in(int lo, int hi) { return lo + static_cast<int>(rng_.bounded(static_cast<std::uint32_t>(hi - lo + 1))); }
  double real() { return rng_.uniform(); }
  bool coin(double p_true) { return rng_.uniform() < p_true; }
  std::uint8_t byte() { return static_cast<std::uint8_t>(rng_.bounded(256)); }

  GrayRaster gray(int w, int h) {
    std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h);
    for (auto& v : px) v = byte();
    return GrayRaster(w, h, std::move(px));
  }

  /// Values restricted to [lo, hi].
  GrayRaster gray_in(int w, int h, int lo, int hi) {
    std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h);
    for (auto& v : px) v = static_cast<std::uint8_t>(int_in(lo, hi));
    return GrayRaster(w, h, std::move(px));
  }

  RgbRaster rgb(int w, int h) {
    std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h * 3);
    for (auto& v : px) v = byte();
    return RgbRaster(w, h, std::move(px));
  }

  BinaryMask mask(int w, int h, double density) {
    BinaryMask m(w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) m.set(x, y, coin(density));
    }
    return m;
  }

  Pcg32& rng() { return rng_; }

 private:
  Pcg32 rng_;
};

}  // namespace fundus::testing
