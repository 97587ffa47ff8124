#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fundus/features.hpp"

namespace fundus {

/// Retinopathy grade; ties anywhere in the classifiers resolve to the lowest
/// (most benign) grade.
enum class Grade : std::uint8_t { Healthy = 0, Mild = 1, Moderate = 2, Severe = 3, Proliferative = 4 };

inline constexpr std::size_t kGradeCount = 5;

std::string_view to_string(Grade grade) noexcept;

/// Grade from its integer level; nullopt outside 0..4.
std::optional<Grade> grade_from_level(long level) noexcept;

constexpr std::size_t index_of(Grade g) noexcept { return static_cast<std::size_t>(g); }

// ---- Random forest ----------------------------------------------------------

using ClassCounts = std::array<std::uint32_t, kGradeCount>;

/// Flat tree node. Internal nodes send x[feature] <= threshold to `left`.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  ClassCounts counts{};  // meaningful for leaves only

  bool is_leaf() const noexcept { return left < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  const TreeNode& leaf_for(std::span<const double> x) const;
  Grade predict(std::span<const double> x) const;
  std::size_t depth() const;
  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

struct RandomForestParams {
  std::size_t n_trees = 100;
  std::size_t max_depth = 16;   // 0 = unlimited
  std::size_t m_features = 0;   // 0 = ceil(sqrt(dimension))
  bool bootstrap = true;
  std::uint64_t seed = 42;
  unsigned threads = 1;         // trees are built in parallel; results do not depend on this

  void validate() const;
  friend bool operator==(const RandomForestParams& a, const RandomForestParams& b) {
    return a.n_trees == b.n_trees && a.max_depth == b.max_depth && a.m_features == b.m_features &&
           a.bootstrap == b.bootstrap && a.seed == b.seed;
  }
};

struct RandomForestModel {
  RandomForestParams params;
  std::size_t dimension = 0;
  std::vector<DecisionTree> trees;
  friend bool operator==(const RandomForestModel&, const RandomForestModel&) = default;
};

/// CART trees on bootstrap samples (one PCG32 stream per tree index), Gini
/// splits at midpoints between consecutive distinct values. Each node draws
/// features without replacement and keeps drawing past m_features until a
/// usable split is found or the features run out.
RandomForestModel rf_train(const FeatureMatrix& x, std::span<const Grade> y, const RandomForestParams& params);

Grade rf_predict(const RandomForestModel& model, std::span<const double> x);

// ---- Gaussian naive Bayes ---------------------------------------------------

struct GaussianNBModel {
  std::size_t classes = kGradeCount;
  std::size_t dimension = 0;
  std::vector<double> priors;     // classes
  std::vector<double> means;      // classes x dimension
  std::vector<double> variances;  // classes x dimension, each >= var_floor
  double var_floor = 0.0;
  friend bool operator==(const GaussianNBModel&, const GaussianNBModel&) = default;
};

/// Labels must cover 0..classes-1 with at least two classes; every class must
/// have a row.
GaussianNBModel nb_train(const FeatureMatrix& x, std::span<const Grade> y, std::size_t classes = kGradeCount);

/// Log joint likelihood per class.
std::vector<double> nb_log_scores(const GaussianNBModel& model, std::span<const double> x);

Grade nb_predict(const GaussianNBModel& model, std::span<const double> x);

// ---- Linear SVM --------------------------------------------------------------

struct LinearModel {
  std::vector<double> w;
  double b = 0.0;

  double decision(std::span<const double> x) const;
  friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

struct SvmParams {
  double lambda = 1e-4;
  std::size_t epochs = 200;
  std::uint64_t seed = 42;

  void validate() const;
  friend bool operator==(const SvmParams&, const SvmParams&) = default;
};

/// Regularized hinge objective lambda/2 |w|^2 + mean hinge loss, with the bias
/// folded in as an extra constant feature.
double svm_objective(const LinearModel& model, const FeatureMatrix& x, std::span<const int> y, double lambda);

/// Pegasos with step 1/(lambda t), shuffling each epoch from PCG32 stream
/// `stream`. Returns the iterate with the lowest objective seen at epoch
/// boundaries, starting from w = 0. Labels are -1/+1 and both must occur.
LinearModel svm_train_binary(const FeatureMatrix& x, std::span<const int> y, const SvmParams& params,
                             std::uint64_t stream = 0);

/// Healthy vs DR, then NPDR vs PDR on DR rows, then one-vs-rest among
/// Mild/Moderate/Severe on NPDR rows.
struct SvmCascadeModel {
  SvmParams params;
  std::size_t dimension = 0;
  LinearModel healthy_vs_dr;
  LinearModel npdr_vs_pdr;
  std::array<LinearModel, 3> npdr_grades;  // Mild, Moderate, Severe
  friend bool operator==(const SvmCascadeModel&, const SvmCascadeModel&) = default;
};

SvmCascadeModel svm_cascade_train(const FeatureMatrix& x, std::span<const Grade> y, const SvmParams& params);

Grade svm_cascade_predict(const SvmCascadeModel& model, std::span<const double> x);

}  // namespace fundus
