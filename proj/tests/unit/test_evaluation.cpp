#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <string>

#include "fundus/evaluation.hpp"
#include "generators.hpp"

namespace fundus {
namespace {

using testing::Gen;

ConfusionMatrix published_matrix() {
  ConfusionMatrix cm;
  cm.counts = {{{989, 100, 114, 63, 66},
                {116, 466, 10, 6, 6},
                {122, 10, 492, 8, 10},
                {82, 2, 12, 316, 8},
                {40, 4, 14, 4, 291}}};
  return cm;
}

TEST(Split, PublishedSizes) {
  EXPECT_EQ(train_size(13402, 0.75), 10052u);
  const auto s = split_indices(13402, 0.75, 42);
  EXPECT_EQ(s.train.size(), 10052u);
  EXPECT_EQ(s.test.size(), 3350u);
  EXPECT_EQ(split_indices(4, 0.75, 1).train.size(), 3u);
  EXPECT_EQ(train_size(3, 0.5), 2u);
}

TEST(Split, DisjointCoverAndDeterministic) {
  Gen gen(21);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = static_cast<std::size_t>(gen.int_in(1, 300));
    const double frac = 0.05 + 0.9 * gen.real();
    const std::uint64_t seed = gen.rng().next();
    const auto s = split_indices(n, frac, seed);
    EXPECT_EQ(s.train.size(), train_size(n, frac));
    std::vector<std::size_t> all = s.train;
    all.insert(all.end(), s.test.begin(), s.test.end());
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> expect(n);
    std::iota(expect.begin(), expect.end(), 0);
    EXPECT_EQ(all, expect);
    const auto again = split_indices(n, frac, seed);
    EXPECT_EQ(again.train, s.train);
    EXPECT_EQ(again.test, s.test);
  }
  EXPECT_NE(split_indices(100, 0.75, 1).train, split_indices(100, 0.75, 2).train);
}

TEST(Split, DatasetTemplateAndErrors) {
  std::vector<LabeledItem> items;
  for (int i = 0; i < 8; ++i) items.push_back({"img" + std::to_string(i), static_cast<Grade>(i % 5)});
  const auto [train, test] = split_dataset<LabeledItem>(items, 0.75, 3);
  EXPECT_EQ(train.size(), 6u);
  EXPECT_EQ(test.size(), 2u);
  EXPECT_THROW(split_indices(0, 0.75, 1), std::invalid_argument);
  EXPECT_THROW(split_indices(5, 0.0, 1), std::invalid_argument);
  EXPECT_THROW(split_indices(5, 1.0, 1), std::invalid_argument);
}

TEST(Confusion, Examples) {
  const std::vector<Grade> all{Grade::Healthy, Grade::Mild, Grade::Moderate, Grade::Severe, Grade::Proliferative};
  const auto id = confusion_matrix(all, all);
  for (std::size_t a = 0; a < 5; ++a) {
    for (std::size_t p = 0; p < 5; ++p) EXPECT_EQ(id.counts[a][p], a == p ? 1u : 0u);
  }
  const auto one = confusion_matrix(std::vector<Grade>{Grade::Moderate}, std::vector<Grade>{Grade::Proliferative});
  EXPECT_EQ(one.counts[2][4], 1u);
  EXPECT_EQ(one.total(), 1u);
  EXPECT_THROW(confusion_matrix(all, std::vector<Grade>{Grade::Healthy}), std::invalid_argument);
}

TEST(Confusion, MatchesCountingOracle) {
  Gen gen(22);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = gen.int_in(1, 200);
    std::vector<Grade> a, p;
    for (int i = 0; i < n; ++i) {
      a.push_back(static_cast<Grade>(gen.int_in(0, 4)));
      p.push_back(static_cast<Grade>(gen.int_in(0, 4)));
    }
    const auto cm = confusion_matrix(a, p);
    for (std::size_t r = 0; r < 5; ++r) {
      for (std::size_t c = 0; c < 5; ++c) {
        std::uint64_t k = 0;
        for (int i = 0; i < n; ++i) k += index_of(a[i]) == r && index_of(p[i]) == c;
        EXPECT_EQ(cm.counts[r][c], k);
      }
      const auto row = std::accumulate(cm.counts[r].begin(), cm.counts[r].end(), std::uint64_t{0});
      EXPECT_EQ(row, static_cast<std::uint64_t>(std::count(a.begin(), a.end(), static_cast<Grade>(r))));
    }
    EXPECT_EQ(cm.total(), static_cast<std::uint64_t>(n));
  }
}

TEST(Metrics, PerfectDiagonal) {
  ConfusionMatrix cm;
  for (std::size_t c = 0; c < 5; ++c) cm.counts[c][c] = c + 1;
  const auto m = compute_metrics(cm);
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(m.macro_sensitivity, 1.0);
  EXPECT_EQ(m.macro_specificity, 1.0);
}

TEST(Metrics, PublishedConfusionMatrix) {
  const auto cm = published_matrix();
  EXPECT_EQ(cm.total(), 3351u);
  EXPECT_EQ(cm.trace(), 2554u);
  const auto m = compute_metrics(cm);
  EXPECT_DOUBLE_EQ(m.accuracy, 2554.0 / 3351.0);
  const double recall = (989.0 / 1332 + 466.0 / 604 + 492.0 / 642 + 316.0 / 420 + 291.0 / 353) / 5;
  EXPECT_NEAR(m.macro_sensitivity, recall, 1e-15);
  EXPECT_NEAR(m.macro_sensitivity, 0.772, 0.001);
  EXPECT_NEAR(m.macro_specificity, 0.933, 0.001);
  EXPECT_NEAR(m.accuracy, 0.765, 0.005);
}

TEST(Metrics, ScaleInvariant) {
  Gen gen(23);
  for (int trial = 0; trial < 20; ++trial) {
    ConfusionMatrix cm, scaled;
    const std::uint64_t k = static_cast<std::uint64_t>(gen.int_in(2, 50));
    for (std::size_t r = 0; r < 5; ++r) {
      for (std::size_t c = 0; c < 5; ++c) {
        cm.counts[r][c] = static_cast<std::uint64_t>(gen.int_in(0, 30));
        scaled.counts[r][c] = k * cm.counts[r][c];
      }
    }
    cm.counts[0][0] += 1;
    scaled.counts[0][0] += k;
    const auto a = compute_metrics(cm);
    const auto b = compute_metrics(scaled);
    EXPECT_DOUBLE_EQ(a.accuracy, b.accuracy);
    EXPECT_DOUBLE_EQ(a.macro_sensitivity, b.macro_sensitivity);
    EXPECT_DOUBLE_EQ(a.macro_specificity, b.macro_specificity);
    for (std::size_t c = 0; c < 5; ++c) {
      EXPECT_DOUBLE_EQ(a.sensitivity[c], b.sensitivity[c]);
      EXPECT_DOUBLE_EQ(a.specificity[c], b.specificity[c]);
      EXPECT_GE(a.sensitivity[c], 0.0);
      EXPECT_LE(a.specificity[c], 1.0);
    }
  }
}

TEST(Metrics, TwoClassReducesToClassical) {
  ConfusionMatrix cm;
  const double tp = 40, fn = 10, fp = 5, tn = 45;
  cm.counts[1][1] = 40;
  cm.counts[1][0] = 10;
  cm.counts[0][1] = 5;
  cm.counts[0][0] = 45;
  const auto m = compute_metrics(cm);
  EXPECT_DOUBLE_EQ(m.accuracy, (tp + tn) / (tp + tn + fp + fn));
  EXPECT_DOUBLE_EQ(m.sensitivity[1], tp / (tp + fn));
  EXPECT_DOUBLE_EQ(m.specificity[1], tn / (tn + fp));
  EXPECT_DOUBLE_EQ(m.sensitivity[0], m.specificity[1]);
  EXPECT_DOUBLE_EQ(m.specificity[0], m.sensitivity[1]);
  for (std::size_t c = 2; c < 5; ++c) {
    EXPECT_TRUE(m.degenerate[c]);
    EXPECT_EQ(m.sensitivity[c], 0.0);
  }
  EXPECT_FALSE(m.degenerate[0]);
  EXPECT_FALSE(m.degenerate[1]);
}

TEST(Metrics, AllZeroThrows) { EXPECT_THROW(compute_metrics(ConfusionMatrix{}), std::invalid_argument); }

}  // namespace
}  // namespace fundus
