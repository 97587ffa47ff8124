#include "fundus/evaluation.hpp"

#include <cmath>
#include <numeric>

namespace fundus {

std::size_t train_size(std::size_t n, double train_frac) {
  if (!(train_frac > 0.0 && train_frac < 1.0)) throw std::invalid_argument("train fraction must lie in (0, 1)");
  return static_cast<std::size_t>(std::floor(train_frac * static_cast<double>(n) + 0.5));
}

SplitIndices split_indices(std::size_t n, double train_frac, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("split_dataset: no items");
  const std::size_t n_train = train_size(n, train_frac);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Pcg32 rng = Pcg32::derive(seed, 0);
  shuffle(std::span<std::size_t>(order), rng);
  SplitIndices out;
  out.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  return out;
}

std::uint64_t ConfusionMatrix::total() const noexcept {
  std::uint64_t s = 0;
  for (const auto& row : counts) s = std::accumulate(row.begin(), row.end(), s);
  return s;
}

std::uint64_t ConfusionMatrix::trace() const noexcept {
  std::uint64_t s = 0;
  for (std::size_t c = 0; c < kGradeCount; ++c) s += counts[c][c];
  return s;
}

ConfusionMatrix confusion_matrix(std::span<const Grade> actual, std::span<const Grade> predicted) {
  if (actual.size() != predicted.size()) throw std::invalid_argument("confusion_matrix: length mismatch");
  if (actual.empty()) throw std::invalid_argument("confusion_matrix: no labels");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < actual.size(); ++i) ++cm.counts[index_of(actual[i])][index_of(predicted[i])];
  return cm;
}

Metrics compute_metrics(const ConfusionMatrix& cm) {
  const std::uint64_t total = cm.total();
  if (total == 0) throw std::invalid_argument("compute_metrics: empty confusion matrix");
  Metrics m;
  m.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(total);
  for (std::size_t c = 0; c < kGradeCount; ++c) {
    const std::uint64_t tp = cm.counts[c][c];
    std::uint64_t row = 0;
    std::uint64_t col = 0;
    for (std::size_t k = 0; k < kGradeCount; ++k) {
      row += cm.counts[c][k];
      col += cm.counts[k][c];
    }
    const std::uint64_t fn = row - tp;
    const std::uint64_t fp = col - tp;
    const std::uint64_t tn = total - tp - fn - fp;
    if (tp + fn > 0) {
      m.sensitivity[c] = static_cast<double>(tp) / static_cast<double>(tp + fn);
    } else {
      m.degenerate[c] = true;
    }
    if (tn + fp > 0) {
      m.specificity[c] = static_cast<double>(tn) / static_cast<double>(tn + fp);
    } else {
      m.degenerate[c] = true;
    }
    m.macro_sensitivity += m.sensitivity[c];
    m.macro_specificity += m.specificity[c];
  }
  m.macro_sensitivity /= static_cast<double>(kGradeCount);
  m.macro_specificity /= static_cast<double>(kGradeCount);
  return m;
}

}  // namespace fundus
