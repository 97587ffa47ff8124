#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "fundus/raster.hpp"

namespace fundus {

enum class Connectivity { Four = 4, Eight = 8 };

struct BoundingBox {
  int min_x;
  int min_y;
  int max_x;
  int max_y;
  std::size_t area() const noexcept {
    return static_cast<std::size_t>(max_x - min_x + 1) * static_cast<std::size_t>(max_y - min_y + 1);
  }
  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct Point {
  int x;
  int y;
  friend bool operator==(const Point&, const Point&) = default;
};

/// A maximal connected set of mask pixels. Labels run 1..N in the raster-scan
/// order of each component's first pixel.
struct Component {
  int label = 0;
  std::size_t area = 0;
  BoundingBox bbox{};
  std::vector<Point> pixels;  // filled only when requested
};

/// Per-pixel component labels (0 = background) alongside the component list.
struct Labeling {
  int width = 0;
  int height = 0;
  std::vector<int> labels;
  std::vector<Component> components;
};

Labeling label_components(const BinaryMask& mask, Connectivity connectivity = Connectivity::Eight);

std::vector<Component> connected_components(const BinaryMask& mask, Connectivity connectivity = Connectivity::Eight,
                                            bool with_pixels = false);

inline constexpr std::size_t kUnboundedArea = std::numeric_limits<std::size_t>::max();

/// Keeps exactly the components whose pixel count lies in [min_area, max_area].
BinaryMask filter_components_by_area(const BinaryMask& mask, std::size_t min_area, std::size_t max_area = kUnboundedArea,
                                     Connectivity connectivity = Connectivity::Eight);

}  // namespace fundus
