#include "fundus/regions.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace fundus {

namespace {

// Union-find over provisional labels.
class DisjointSets {
 public:
  int make() {
    parent_.push_back(static_cast<int>(parent_.size()));
    return parent_.back();
  }
  int find(int x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      auto& p = parent_[static_cast<std::size_t>(x)];
      p = parent_[static_cast<std::size_t>(p)];
      x = p;
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[static_cast<std::size_t>(b)] = a;
  }
  std::size_t size() const noexcept { return parent_.size(); }

 private:
  std::vector<int> parent_;
};

}  // namespace

// Two-pass labeling: provisional labels with equivalences from the already
// visited neighbours, then a resolving pass that renumbers roots in the order
// their first pixel is met.
Labeling label_components(const BinaryMask& mask, Connectivity connectivity) {
  const int w = mask.width();
  const int h = mask.height();
  Labeling out;
  out.width = w;
  out.height = h;
  out.labels.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0);
  if (mask.size() == 0) return out;

  DisjointSets sets;
  sets.make();  // provisional label 0 is background
  const auto idx = [w](int x, int y) { return static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + x; };
  const bool eight = connectivity == Connectivity::Eight;

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.test(x, y)) continue;
      int label = 0;
      const auto join = [&](int nx, int ny) {
        if (nx < 0 || ny < 0 || nx >= w) return;
        const int other = out.labels[idx(nx, ny)];
        if (other == 0) return;
        if (label == 0) {
          label = other;
        } else {
          sets.unite(label, other);
        }
      };
      join(x - 1, y);
      join(x, y - 1);
      if (eight) {
        join(x - 1, y - 1);
        join(x + 1, y - 1);
      }
      if (label == 0) label = sets.make();
      out.labels[idx(x, y)] = label;
    }
  }

  std::vector<int> dense(sets.size(), 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      auto& l = out.labels[idx(x, y)];
      if (l == 0) continue;
      const int root = sets.find(l);
      auto& d = dense[static_cast<std::size_t>(root)];
      if (d == 0) {
        out.components.push_back({static_cast<int>(out.components.size()) + 1, 0, {x, y, x, y}, {}});
        d = out.components.back().label;
      }
      l = d;
      Component& c = out.components[static_cast<std::size_t>(d - 1)];
      ++c.area;
      c.bbox.min_x = std::min(c.bbox.min_x, x);
      c.bbox.max_x = std::max(c.bbox.max_x, x);
      c.bbox.max_y = y;
    }
  }
  return out;
}

std::vector<Component> connected_components(const BinaryMask& mask, Connectivity connectivity, bool with_pixels) {
  Labeling labeling = label_components(mask, connectivity);
  if (with_pixels) {
    for (auto& c : labeling.components) c.pixels.reserve(c.area);
    for (int y = 0; y < labeling.height; ++y) {
      for (int x = 0; x < labeling.width; ++x) {
        const int l = labeling.labels[static_cast<std::size_t>(y) * labeling.width + x];
        if (l != 0) labeling.components[static_cast<std::size_t>(l - 1)].pixels.push_back({x, y});
      }
    }
  }
  return std::move(labeling.components);
}

BinaryMask filter_components_by_area(const BinaryMask& mask, std::size_t min_area, std::size_t max_area,
                                     Connectivity connectivity) {
  if (min_area > max_area) throw std::invalid_argument("filter_components_by_area: min_area exceeds max_area");
  const Labeling labeling = label_components(mask, connectivity);
  std::vector<bool> keep(labeling.components.size() + 1, false);
  for (const auto& c : labeling.components) {
    keep[static_cast<std::size_t>(c.label)] = c.area >= min_area && c.area <= max_area;
  }
  BinaryMask out(mask.width(), mask.height());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (keep[static_cast<std::size_t>(labeling.labels[static_cast<std::size_t>(y) * mask.width() + x])]) out.set(x, y);
    }
  }
  return out;
}

}  // namespace fundus
