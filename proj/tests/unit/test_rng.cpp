#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <vector>

#include "fundus/rng.hpp"

namespace fundus {
namespace {

TEST(Pcg32, ReferenceSequence) {
  // pcg32 demo output for state 42, sequence 54.
  Pcg32 rng(42u, 54u);
  const std::uint32_t expected[] = {0xa15c02b7, 0x7b47f409, 0xba1d3330, 0x83d2f293, 0xbfa4784b, 0xcbed606e};
  for (const auto e : expected) EXPECT_EQ(rng.next(), e);
}

TEST(Pcg32, BoundedStaysInRange) {
  Pcg32 rng = Pcg32::derive(3, 0);
  for (std::uint32_t bound : {1u, 2u, 7u, 1000u, 0x80000001u}) {
    for (int i = 0; i < 1000; ++i) EXPECT_LT(rng.bounded(bound), bound);
  }
}

TEST(Pcg32, StreamsDiffer) {
  Pcg32 a = Pcg32::derive(9, 0);
  Pcg32 b = Pcg32::derive(9, 1);
  Pcg32 c = Pcg32::derive(9, 0);
  int same = 0;
  for (int i = 0; i < 64; ++i) {
    const auto x = a.next();
    same += x == b.next();
    EXPECT_EQ(x, c.next());
  }
  EXPECT_LT(same, 2);
}

TEST(Shuffle, IsPermutationAndSeeded) {
  std::vector<int> v(100);
  std::iota(v.begin(), v.end(), 0);
  auto w = v;
  Pcg32 r1 = Pcg32::derive(5, 0);
  Pcg32 r2 = Pcg32::derive(5, 0);
  shuffle(std::span<int>(v), r1);
  shuffle(std::span<int>(w), r2);
  EXPECT_EQ(v, w);
  auto sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sorted[i], i);
  EXPECT_FALSE(std::is_sorted(v.begin(), v.end()));
}

TEST(Uniform, InUnitInterval) {
  Pcg32 rng = Pcg32::derive(11, 2);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

}  // namespace
}  // namespace fundus
