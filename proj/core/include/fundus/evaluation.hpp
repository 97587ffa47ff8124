#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fundus/classifiers.hpp"
#include "fundus/rng.hpp"

namespace fundus {

struct LabeledItem {
  std::string image_id;
  Grade label = Grade::Healthy;
  friend bool operator==(const LabeledItem&, const LabeledItem&) = default;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Number of training items: round-half-up of train_frac * n.
std::size_t train_size(std::size_t n, double train_frac);

/// Seeded PCG32 shuffle of 0..n-1; the first train_size(n) go to train.
SplitIndices split_indices(std::size_t n, double train_frac, std::uint64_t seed);

template <typename T>
std::pair<std::vector<T>, std::vector<T>> split_dataset(std::span<const T> items, double train_frac,
                                                        std::uint64_t seed) {
  const SplitIndices split = split_indices(items.size(), train_frac, seed);
  std::pair<std::vector<T>, std::vector<T>> out;
  out.first.reserve(split.train.size());
  out.second.reserve(split.test.size());
  for (const auto i : split.train) out.first.push_back(items[i]);
  for (const auto i : split.test) out.second.push_back(items[i]);
  return out;
}

/// Rows are actual grades, columns predicted grades.
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, kGradeCount>, kGradeCount> counts{};

  std::uint64_t total() const noexcept;
  std::uint64_t trace() const noexcept;
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

ConfusionMatrix confusion_matrix(std::span<const Grade> actual, std::span<const Grade> predicted);

struct Metrics {
  double accuracy = 0.0;
  double macro_sensitivity = 0.0;
  double macro_specificity = 0.0;
  std::array<double, kGradeCount> sensitivity{};
  std::array<double, kGradeCount> specificity{};
  /// Classes whose sensitivity (TP + FN) or specificity (TN + FP) denominator
  /// was zero; they contribute 0 to the macro average.
  std::array<bool, kGradeCount> degenerate{};
};

/// Accuracy = trace / total; per-class one-vs-rest sensitivity and
/// specificity, macro-averaged with equal class weights.
Metrics compute_metrics(const ConfusionMatrix& cm);

}  // namespace fundus
