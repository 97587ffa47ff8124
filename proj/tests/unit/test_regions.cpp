#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "fundus/regions.hpp"
#include "generators.hpp"
#include "oracles.hpp"

namespace fundus {
namespace {

using testing::Gen;

TEST(Components, EmptyMask) { EXPECT_TRUE(connected_components(BinaryMask(6, 4)).empty()); }

TEST(Components, DiagonalPair) {
  BinaryMask m(2, 2);
  m.set(0, 0);
  m.set(1, 1);
  EXPECT_EQ(connected_components(m, Connectivity::Eight).size(), 1u);
  EXPECT_EQ(connected_components(m, Connectivity::Four).size(), 2u);
}

TEST(Components, FullMask) {
  const BinaryMask m(7, 5, true);
  const auto cs = connected_components(m);
  ASSERT_EQ(cs.size(), 1u);
  EXPECT_EQ(cs[0].area, 35u);
  EXPECT_EQ(cs[0].bbox, (BoundingBox{0, 0, 6, 4}));
}

TEST(Components, LabelsFollowRasterDiscovery) {
  // A "U" whose right arm is discovered first on row 0 only through a
  // merge; labels still follow the first pixel of each component.
  BinaryMask m(5, 3);
  for (const auto& [x, y] : std::vector<std::pair<int, int>>{{0, 0}, {0, 1}, {0, 2}, {1, 2}, {2, 2}, {2, 0}, {2, 1}, {4, 0}}) {
    m.set(x, y);
  }
  const auto cs = connected_components(m, Connectivity::Four, true);
  ASSERT_EQ(cs.size(), 2u);
  EXPECT_EQ(cs[0].label, 1);
  EXPECT_EQ(cs[0].area, 7u);
  EXPECT_EQ(cs[1].area, 1u);
  EXPECT_EQ(cs[1].bbox.min_x, 4);
  EXPECT_EQ(cs[0].pixels.size(), 7u);
}

TEST(Components, MatchFloodFillOracle) {
  Gen gen(1);
  for (int trial = 0; trial < 200; ++trial) {
    const int w = gen.int_in(1, 24);
    const int h = gen.int_in(1, 24);
    const BinaryMask m = gen.mask(w, h, gen.real());
    for (const auto conn : {Connectivity::Four, Connectivity::Eight}) {
      const auto oracle = testing::flood_fill_oracle(m, static_cast<int>(conn));
      const Labeling lab = label_components(m, conn);
      ASSERT_EQ(lab.components.size(), oracle.sizes.size());
      // Flood fill also discovers in raster order, so labels agree exactly.
      EXPECT_EQ(lab.labels, oracle.label);
      std::size_t total = 0;
      for (std::size_t i = 0; i < lab.components.size(); ++i) {
        const Component& c = lab.components[i];
        EXPECT_EQ(c.label, static_cast<int>(i) + 1);
        EXPECT_EQ(c.area, oracle.sizes[i]);
        EXPECT_GE(c.area, 1u);
        EXPECT_LE(c.area, c.bbox.area());
        total += c.area;
      }
      EXPECT_EQ(total, count_nonzero(m));
    }
    EXPECT_LE(connected_components(m, Connectivity::Eight).size(), connected_components(m, Connectivity::Four).size());
  }
}

TEST(Components, PixelsPartitionTheMask) {
  Gen gen(2);
  const BinaryMask m = gen.mask(20, 20, 0.45);
  const auto cs = connected_components(m, Connectivity::Eight, true);
  std::set<std::pair<int, int>> seen;
  for (const auto& c : cs) {
    EXPECT_EQ(c.pixels.size(), c.area);
    for (const auto& p : c.pixels) {
      EXPECT_TRUE(m.test(p.x, p.y));
      EXPECT_TRUE(seen.insert({p.x, p.y}).second);
      EXPECT_GE(p.x, c.bbox.min_x);
      EXPECT_LE(p.x, c.bbox.max_x);
    }
  }
  EXPECT_EQ(seen.size(), count_nonzero(m));
}

TEST(AreaFilter, UnboundedBandIsIdentity) {
  Gen gen(3);
  const BinaryMask m = gen.mask(15, 15, 0.5);
  EXPECT_EQ(filter_components_by_area(m, 1), m);
  EXPECT_EQ(filter_components_by_area(BinaryMask(4, 4), 1), BinaryMask(4, 4));
}

TEST(AreaFilter, KeepsOnlyBigComponent) {
  BinaryMask m(40, 40);
  for (int x = 0; x < 3; ++x) m.set(x, 0);
  for (int y = 10; y < 20; ++y) {
    for (int x = 0; x < 25; ++x) m.set(x, y);
  }
  const BinaryMask out = filter_components_by_area(m, 200);
  EXPECT_EQ(count_nonzero(out), 250u);
  EXPECT_FALSE(out.test(0, 0));
  EXPECT_TRUE(out.test(5, 15));
}

TEST(AreaFilter, MatchesOracleAndIsIdempotent) {
  Gen gen(4);
  for (int trial = 0; trial < 100; ++trial) {
    const BinaryMask m = gen.mask(gen.int_in(1, 20), gen.int_in(1, 20), gen.real());
    const std::size_t lo = static_cast<std::size_t>(gen.int_in(1, 10));
    const std::size_t hi = lo + static_cast<std::size_t>(gen.int_in(0, 30));
    for (const auto conn : {Connectivity::Four, Connectivity::Eight}) {
      const BinaryMask out = filter_components_by_area(m, lo, hi, conn);
      EXPECT_EQ(out, testing::area_filter_oracle(m, lo, hi, static_cast<int>(conn)));
      EXPECT_EQ(filter_components_by_area(out, lo, hi, conn), out);
      for (const auto& c : connected_components(out, conn)) {
        EXPECT_GE(c.area, lo);
        EXPECT_LE(c.area, hi);
      }
    }
  }
}

TEST(AreaFilter, RejectsInvertedBand) {
  EXPECT_THROW(filter_components_by_area(BinaryMask(3, 3), 5, 4), std::invalid_argument);
}

}  // namespace
}  // namespace fundus
