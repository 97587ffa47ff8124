#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "fundus/enhance.hpp"
#include "generators.hpp"
#include "oracles.hpp"

namespace fundus {
namespace {

using testing::Gen;

TEST(Histogram, CountsPixels) {
  const Histogram h = histogram(GrayRaster(2, 2, 0));
  EXPECT_EQ(h[0], 4u);
  EXPECT_EQ(std::accumulate(h.begin() + 1, h.end(), std::uint64_t{0}), 0u);
}

TEST(Histogram, EmptyMaskGivesZeroBins) {
  const BinaryMask m(3, 3);
  const Histogram h = histogram(GrayRaster(3, 3, 9), &m);
  EXPECT_EQ(std::accumulate(h.begin(), h.end(), std::uint64_t{0}), 0u);
}

TEST(Histogram, MatchesCountingOracleWithMask) {
  Gen gen(1);
  for (int trial = 0; trial < 30; ++trial) {
    const GrayRaster g = gen.gray(11, 7);
    const BinaryMask m = gen.mask(11, 7, gen.real());
    std::array<std::uint64_t, 256> expect{};
    std::size_t selected = 0;
    for (int y = 0; y < 7; ++y) {
      for (int x = 0; x < 11; ++x) {
        if (m.test(x, y)) {
          ++expect[g(x, y)];
          ++selected;
        }
      }
    }
    const Histogram h = histogram(g, &m);
    EXPECT_EQ(h, expect);
    EXPECT_EQ(std::accumulate(h.begin(), h.end(), std::uint64_t{0}), selected);
  }
}

TEST(Histogram, RejectsMismatchedMask) {
  const BinaryMask m(2, 3);
  EXPECT_THROW(histogram(GrayRaster(3, 2), &m), std::invalid_argument);
}

TEST(Clahe, ConstantImageIsUnchanged) {
  for (const int v : {0, 1, 77, 254, 255}) {
    const GrayRaster g(40, 30, static_cast<std::uint8_t>(v));
    EXPECT_EQ(clahe(g), g);
    EXPECT_EQ(clahe(g, {3, 5, 1.0}), g);
  }
}

TEST(Clahe, SingleTileNonBindingClipIsGlobalEqualization) {
  Gen gen(2);
  for (int trial = 0; trial < 25; ++trial) {
    const GrayRaster g = gen.gray_in(32, 32, gen.int_in(0, 60), gen.int_in(120, 255));
    const GrayRaster got = clahe(g, {1, 1, 256.0});
    EXPECT_EQ(got, testing::global_equalize_oracle(g));
  }
}

TEST(Clahe, PreservesShapeAndHandlesSmallImages) {
  Gen gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    const GrayRaster g = gen.gray(gen.int_in(1, 30), gen.int_in(1, 30));
    const GrayRaster out = clahe(g);
    EXPECT_TRUE(same_shape(out, g));
  }
}

TEST(Clahe, ClipLimitsContrastGain) {
  // Two-level tile: global equalization stretches to the extremes, a tight
  // clip keeps the levels close to where they were.
  std::vector<std::uint8_t> px(64 * 64);
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = (i % 64) < 32 ? 100 : 104;
  const GrayRaster g(64, 64, px);
  const GrayRaster loose = clahe(g, {1, 1, 256.0});
  const GrayRaster tight = clahe(g, {1, 1, 1.0});
  EXPECT_EQ(loose(0, 0), 0);
  EXPECT_EQ(loose(63, 0), 255);
  EXPECT_LT(tight(63, 0) - tight(0, 0), 40);
}

TEST(Clahe, RejectsBadParams) {
  const GrayRaster g(8, 8);
  EXPECT_THROW(clahe(g, {0, 1, 2.0}), std::invalid_argument);
  EXPECT_THROW(clahe(g, {1, 1, 0.5}), std::invalid_argument);
}

TEST(Median, KOneIsIdentity) {
  Gen gen(4);
  const GrayRaster g = gen.gray(9, 9);
  EXPECT_EQ(median_filter(g, 1), g);
}

TEST(Median, RemovesIsolatedSpike) {
  GrayRaster g(3, 3, 0);
  g(1, 1) = 255;
  EXPECT_EQ(median_filter(g, 3)(1, 1), 0);
}

TEST(Median, ConstantUnchanged) {
  const GrayRaster g(10, 4, 42);
  for (const int k : {1, 3, 5, 7, 9}) EXPECT_EQ(median_filter(g, k), g);
}

TEST(Median, MatchesSortingOracle) {
  Gen gen(5);
  for (int trial = 0; trial < 40; ++trial) {
    const GrayRaster g = gen.gray(gen.int_in(1, 15), gen.int_in(1, 15));
    const int k = 2 * gen.int_in(0, 3) + 1;
    EXPECT_EQ(median_filter(g, k), testing::median_oracle(g, k));
  }
}

TEST(Median, RejectsEvenOrZeroWindow) {
  const GrayRaster g(5, 5);
  EXPECT_THROW(median_filter(g, 0), std::invalid_argument);
  EXPECT_THROW(median_filter(g, 4), std::invalid_argument);
  EXPECT_THROW(median_filter(g, -3), std::invalid_argument);
}

TEST(Otsu, SeparatesBimodal) {
  Histogram h{};
  h[20] = 100;
  h[200] = 50;
  const auto t = otsu_threshold(h);
  ASSERT_TRUE(t.has_value());
  // Every cut in [20, 199] separates the modes equally well; the lowest wins.
  EXPECT_EQ(*t, 20);
}

TEST(Otsu, DegenerateHistogram) {
  Histogram h{};
  EXPECT_FALSE(otsu_threshold(h).has_value());
  h[77] = 1000;
  EXPECT_FALSE(otsu_threshold(h).has_value());
}

TEST(Otsu, MaximizesBetweenClassVariance) {
  Gen gen(6);
  for (int trial = 0; trial < 60; ++trial) {
    Histogram h{};
    const int occupied = gen.int_in(2, 40);
    for (int i = 0; i < occupied; ++i) h[gen.byte()] += static_cast<std::uint64_t>(gen.int_in(1, 500));
    const std::vector<std::uint64_t> hv(h.begin(), h.end());
    const auto t = otsu_threshold(h);
    ASSERT_TRUE(t.has_value());
    double best = 0.0;
    for (int c = 0; c < 255; ++c) best = std::max(best, testing::otsu_score_oracle(hv, c));
    EXPECT_NEAR(testing::otsu_score_oracle(hv, *t), best, 1e-9 * best);
    // No strictly better cut exists below the chosen one.
    for (int c = 0; c < *t; ++c) EXPECT_LT(testing::otsu_score_oracle(hv, c), best * (1 - 1e-12));
  }
}

}  // namespace
}  // namespace fundus
