#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

#include "fundus/classifiers.hpp"
#include "fundus/rng.hpp"

namespace fundus {

std::string_view to_string(Grade grade) noexcept {
  switch (grade) {
    case Grade::Healthy:
      return "healthy";
    case Grade::Mild:
      return "mild";
    case Grade::Moderate:
      return "moderate";
    case Grade::Severe:
      return "severe";
    case Grade::Proliferative:
      return "pdr";
  }
  return "unknown";
}

std::optional<Grade> grade_from_level(long level) noexcept {
  if (level < 0 || level >= static_cast<long>(kGradeCount)) return std::nullopt;
  return static_cast<Grade>(level);
}

namespace {

Grade argmax(const ClassCounts& counts) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < counts.size(); ++c) {
    if (counts[c] > counts[best]) best = c;
  }
  return static_cast<Grade>(best);
}

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double score = -1.0;  // sum over sides of (sum of squared counts / side size); larger is purer
};

class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& x, std::span<const Grade> y, const RandomForestParams& params, std::size_t m,
              Pcg32 rng)
      : x_(x), y_(y), max_depth_(params.max_depth == 0 ? std::numeric_limits<std::size_t>::max() : params.max_depth),
        m_(m), rng_(rng), features_(x.cols()) {
    std::iota(features_.begin(), features_.end(), std::size_t{0});
  }

  DecisionTree build(std::vector<std::size_t> samples) {
    tree_.nodes.clear();
    grow(samples, 0);
    return std::move(tree_);
  }

 private:
  int grow(std::span<std::size_t> samples, std::size_t depth) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    ClassCounts counts{};
    for (const auto s : samples) ++counts[index_of(y_[s])];
    const auto occupied = std::ranges::count_if(counts, [](std::uint32_t c) { return c != 0; });
    if (occupied <= 1 || depth >= max_depth_ || samples.size() < 2) {
      tree_.nodes[static_cast<std::size_t>(id)].counts = counts;
      return id;
    }
    const Split split = best_split(samples, counts);
    if (split.feature < 0) {
      tree_.nodes[static_cast<std::size_t>(id)].counts = counts;
      return id;
    }
    const auto mid = std::partition(samples.begin(), samples.end(), [&](std::size_t s) {
      return x_(s, static_cast<std::size_t>(split.feature)) <= split.threshold;
    });
    const auto n_left = static_cast<std::size_t>(mid - samples.begin());
    // Partition order is implementation-defined; sort each side so the
    // recursion never depends on it.
    std::sort(samples.begin(), mid);
    std::sort(mid, samples.end());
    const int left = grow(samples.first(n_left), depth + 1);
    const int right = grow(samples.subspan(n_left), depth + 1);
    TreeNode& node = tree_.nodes[static_cast<std::size_t>(id)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = left;
    node.right = right;
    return id;
  }

  Split best_split(std::span<const std::size_t> samples, const ClassCounts& total) {
    Split best;
    std::size_t evaluated = 0;
    const std::size_t d = features_.size();
    for (std::size_t k = 0; k < d; ++k) {
      if (evaluated >= m_ && best.feature >= 0) break;
      const std::size_t j = k + rng_.bounded(static_cast<std::uint32_t>(d - k));
      std::swap(features_[k], features_[j]);
      const std::size_t f = features_[k];
      ++evaluated;
      scan_feature(samples, total, f, best);
    }
    return best;
  }

  void scan_feature(std::span<const std::size_t> samples, const ClassCounts& total, std::size_t f, Split& best) {
    column_.clear();
    for (const auto s : samples) column_.emplace_back(x_(s, f), index_of(y_[s]));
    std::sort(column_.begin(), column_.end());
    if (column_.front().first == column_.back().first) return;

    ClassCounts left{};
    const auto n = column_.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      ++left[column_[i].second];
      const double a = column_[i].first;
      const double b = column_[i + 1].first;
      if (a == b) continue;
      const auto n_left = static_cast<double>(i + 1);
      const auto n_right = static_cast<double>(n - i - 1);
      double sq_left = 0.0;
      double sq_right = 0.0;
      for (std::size_t c = 0; c < kGradeCount; ++c) {
        const double l = left[c];
        const double r = static_cast<double>(total[c] - left[c]);
        sq_left += l * l;
        sq_right += r * r;
      }
      // Minimizing n_l * gini_l + n_r * gini_r == maximizing this score.
      const double score = sq_left / n_left + sq_right / n_right;
      if (score > best.score) {
        double threshold = a + (b - a) / 2.0;
        if (!(threshold < b)) threshold = a;
        best = {static_cast<int>(f), threshold, score};
      }
    }
  }

  const FeatureMatrix& x_;
  std::span<const Grade> y_;
  std::size_t max_depth_;
  std::size_t m_;
  Pcg32 rng_;
  std::vector<std::size_t> features_;
  std::vector<std::pair<double, std::size_t>> column_;
  DecisionTree tree_;
};

DecisionTree train_tree(const FeatureMatrix& x, std::span<const Grade> y, const RandomForestParams& params,
                        std::size_t m, std::size_t tree_index) {
  Pcg32 rng = Pcg32::derive(params.seed, tree_index);
  const std::size_t n = x.rows();
  std::vector<std::size_t> samples(n);
  if (params.bootstrap) {
    for (auto& s : samples) s = rng.bounded(static_cast<std::uint32_t>(n));
    std::ranges::sort(samples);
  } else {
    std::iota(samples.begin(), samples.end(), std::size_t{0});
  }
  return TreeBuilder(x, y, params, m, rng).build(std::move(samples));
}

}  // namespace

const TreeNode& DecisionTree::leaf_for(std::span<const double> x) const {
  const TreeNode* node = &nodes.front();
  while (!node->is_leaf()) {
    const auto next = x[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left : node->right;
    node = &nodes[static_cast<std::size_t>(next)];
  }
  return *node;
}

Grade DecisionTree::predict(std::span<const double> x) const { return argmax(leaf_for(x).counts); }

std::size_t DecisionTree::depth() const {
  std::vector<std::size_t> level(nodes.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (!nodes[i].is_leaf()) {
      level[static_cast<std::size_t>(nodes[i].left)] = level[i] + 1;
      level[static_cast<std::size_t>(nodes[i].right)] = level[i] + 1;
    }
  }
  return deepest;
}

void RandomForestParams::validate() const {
  if (n_trees == 0) throw std::invalid_argument("random forest needs at least one tree");
}

RandomForestModel rf_train(const FeatureMatrix& x, std::span<const Grade> y, const RandomForestParams& params) {
  params.validate();
  if (x.empty() || x.cols() == 0) throw std::invalid_argument("rf_train: empty training set");
  if (x.rows() != y.size()) throw std::invalid_argument("rf_train: feature and label counts differ");
  if (x.rows() > std::numeric_limits<std::uint32_t>::max()) throw std::invalid_argument("rf_train: too many rows");

  const std::size_t d = x.cols();
  std::size_t m = params.m_features;
  if (m == 0) m = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));
  m = std::min(m, d);

  RandomForestModel model;
  model.params = params;
  model.dimension = d;
  model.trees.resize(params.n_trees);

  const unsigned workers = std::max(1u, std::min<unsigned>(params.threads, static_cast<unsigned>(params.n_trees)));
  if (workers == 1) {
    for (std::size_t t = 0; t < params.n_trees; ++t) model.trees[t] = train_tree(x, y, params, m, t);
    return model;
  }
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t t = next++; t < params.n_trees; t = next++) model.trees[t] = train_tree(x, y, params, m, t);
      });
    }
  }
  return model;
}

Grade rf_predict(const RandomForestModel& model, std::span<const double> x) {
  if (x.size() != model.dimension) {
    throw std::invalid_argument("rf_predict: expected " + std::to_string(model.dimension) + " features, got " +
                                std::to_string(x.size()));
  }
  ClassCounts votes{};
  for (const auto& tree : model.trees) ++votes[index_of(tree.predict(x))];
  return argmax(votes);
}

}  // namespace fundus
