#include "oracles.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace fundus::testing {

Footprint ellipse_footprint(int w, int h) {
  Footprint fp{w, h, std::vector<bool>(static_cast<std::size_t>(w) * h)};
  const double a = std::max(w - 1, 1) / 2.0;
  const double b = std::max(h - 1, 1) / 2.0;
  const double cx = (w - 1) / 2.0;
  const double cy = (h - 1) / 2.0;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double u = (c - cx) / a;
      const double v = (r - cy) / b;
      fp.cells[static_cast<std::size_t>(r) * w + c] = u * u + v * v <= 1.0 + 1e-12;
    }
  }
  return fp;
}

namespace {

template <typename Pick>
GrayRaster rank_oracle(const GrayRaster& img, const Footprint& fp, int sign, Pick pick) {
  GrayRaster out(img.width(), img.height());
  const int ax = fp.w / 2;
  const int ay = fp.h / 2;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      int best = -1;
      for (int r = 0; r < fp.h; ++r) {
        for (int c = 0; c < fp.w; ++c) {
          if (!fp.at(c, r)) continue;
          const int v = img.clamped(x + sign * (c - ax), y + sign * (r - ay));
          best = best < 0 ? v : pick(best, v);
        }
      }
      out(x, y) = static_cast<std::uint8_t>(best);
    }
  }
  return out;
}

}  // namespace

GrayRaster erode_oracle(const GrayRaster& img, const Footprint& fp) {
  return rank_oracle(img, fp, +1, [](int a, int b) { return std::min(a, b); });
}

GrayRaster dilate_oracle(const GrayRaster& img, const Footprint& fp) {
  return rank_oracle(img, fp, -1, [](int a, int b) { return std::max(a, b); });
}

GrayRaster median_oracle(const GrayRaster& img, int k) {
  GrayRaster out(img.width(), img.height());
  const int r = k / 2;
  std::vector<std::uint8_t> window;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      window.clear();
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) window.push_back(img.clamped(x + dx, y + dy));
      }
      std::sort(window.begin(), window.end());
      out(x, y) = window[window.size() / 2];
    }
  }
  return out;
}

GrayRaster global_equalize_oracle(const GrayRaster& img) {
  std::array<std::uint64_t, 256> cdf{};
  for (const auto v : img.pixels()) ++cdf[v];
  for (int i = 1; i < 256; ++i) cdf[i] += cdf[i - 1];
  std::uint64_t cdf_min = 0;
  for (const auto c : cdf) {
    if (c != 0) {
      cdf_min = c;
      break;
    }
  }
  const std::uint64_t n = img.size();
  GrayRaster out(img.width(), img.height());
  auto px = out.pixels();
  const auto in = img.pixels();
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (n == cdf_min) {
      px[i] = in[i];
    } else {
      const double v = 255.0 * static_cast<double>(cdf[in[i]] - cdf_min) / static_cast<double>(n - cdf_min);
      px[i] = static_cast<std::uint8_t>(std::floor(v + 0.5));
    }
  }
  return out;
}

FloodLabels flood_fill_oracle(const BinaryMask& mask, int connectivity) {
  const int w = mask.width();
  const int h = mask.height();
  FloodLabels out{std::vector<int>(static_cast<std::size_t>(w) * h, 0), {}};
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.test(x, y) || out.label[static_cast<std::size_t>(y) * w + x] != 0) continue;
      const int id = static_cast<int>(out.sizes.size()) + 1;
      std::size_t size = 0;
      stack.push_back({x, y});
      out.label[static_cast<std::size_t>(y) * w + x] = id;
      while (!stack.empty()) {
        const auto [cx, cy] = stack.back();
        stack.pop_back();
        ++size;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            if (connectivity == 4 && dx != 0 && dy != 0) continue;
            const int nx = cx + dx;
            const int ny = cy + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            auto& l = out.label[static_cast<std::size_t>(ny) * w + nx];
            if (l != 0 || !mask.test(nx, ny)) continue;
            l = id;
            stack.push_back({nx, ny});
          }
        }
      }
      out.sizes.push_back(size);
    }
  }
  return out;
}

BinaryMask area_filter_oracle(const BinaryMask& mask, std::size_t lo, std::size_t hi, int connectivity) {
  const FloodLabels fl = flood_fill_oracle(mask, connectivity);
  BinaryMask out(mask.width(), mask.height());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      const int l = fl.label[static_cast<std::size_t>(y) * mask.width() + x];
      if (l == 0) continue;
      const std::size_t s = fl.sizes[static_cast<std::size_t>(l) - 1];
      out.set(x, y, s >= lo && s <= hi);
    }
  }
  return out;
}

double otsu_score_oracle(const std::vector<std::uint64_t>& hist, int t) {
  double n0 = 0;
  double n1 = 0;
  double s0 = 0;
  double s1 = 0;
  for (int v = 0; v < static_cast<int>(hist.size()); ++v) {
    const double c = static_cast<double>(hist[v]);
    if (v <= t) {
      n0 += c;
      s0 += c * v;
    } else {
      n1 += c;
      s1 += c * v;
    }
  }
  if (n0 == 0 || n1 == 0) return 0.0;
  const double total = n0 + n1;
  const double mu0 = s0 / n0;
  const double mu1 = s1 / n1;
  return (n0 / total) * (n1 / total) * (mu0 - mu1) * (mu0 - mu1);
}

}  // namespace fundus::testing
