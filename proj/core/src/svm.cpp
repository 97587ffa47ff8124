#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "fundus/classifiers.hpp"
#include "fundus/rng.hpp"

namespace fundus {

namespace {

// w holds the feature weights followed by the bias weight.
double margin(std::span<const double> w, std::span<const double> x) {
  double s = w.back();
  for (std::size_t j = 0; j < x.size(); ++j) s += w[j] * x[j];
  return s;
}

double objective(std::span<const double> w, const FeatureMatrix& x, std::span<const int> y, double lambda) {
  double sq = 0.0;
  for (const double v : w) sq += v * v;
  double hinge = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) hinge += std::max(0.0, 1.0 - y[r] * margin(w, x.row(r)));
  return 0.5 * lambda * sq + hinge / static_cast<double>(x.rows());
}

void require_training_set(const FeatureMatrix& x, std::size_t labels) {
  if (x.empty()) throw std::invalid_argument("svm: empty training set");
  if (x.rows() != labels) throw std::invalid_argument("svm: feature and label counts differ");
}

}  // namespace

double LinearModel::decision(std::span<const double> x) const {
  if (x.size() != w.size()) {
    throw std::invalid_argument("svm: expected " + std::to_string(w.size()) + " features, got " +
                                std::to_string(x.size()));
  }
  double s = b;
  for (std::size_t j = 0; j < x.size(); ++j) s += w[j] * x[j];
  return s;
}

void SvmParams::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("svm lambda must be positive");
  if (epochs == 0) throw std::invalid_argument("svm needs at least one epoch");
}

double svm_objective(const LinearModel& model, const FeatureMatrix& x, std::span<const int> y, double lambda) {
  std::vector<double> w = model.w;
  w.push_back(model.b);
  return objective(w, x, y, lambda);
}

LinearModel svm_train_binary(const FeatureMatrix& x, std::span<const int> y, const SvmParams& params,
                             std::uint64_t stream) {
  params.validate();
  require_training_set(x, y.size());
  bool has_pos = false;
  bool has_neg = false;
  for (const int v : y) {
    if (v == 1) {
      has_pos = true;
    } else if (v == -1) {
      has_neg = true;
    } else {
      throw std::invalid_argument("svm labels must be -1 or +1");
    }
  }
  if (!has_pos || !has_neg) throw std::invalid_argument("svm_train_binary: both classes must be present");

  const std::size_t d = x.cols();
  const double lambda = params.lambda;
  std::vector<double> w(d + 1, 0.0);
  std::vector<double> best = w;
  double best_obj = objective(w, x, y, lambda);

  Pcg32 rng = Pcg32::derive(params.seed, stream);
  std::vector<std::size_t> order(x.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::uint64_t t = 0;
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    shuffle(std::span<std::size_t>(order), rng);
    for (const auto i : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const auto xi = x.row(i);
      const double yi = y[i];
      const bool violated = yi * margin(w, xi) < 1.0;
      const double shrink = 1.0 - eta * lambda;
      for (auto& v : w) v *= shrink;
      if (violated) {
        for (std::size_t j = 0; j < d; ++j) w[j] += eta * yi * xi[j];
        w[d] += eta * yi;
      }
    }
    const double obj = objective(w, x, y, lambda);
    if (obj < best_obj) {
      best_obj = obj;
      best = w;
    }
  }
  LinearModel model;
  model.b = best.back();
  best.pop_back();
  model.w = std::move(best);
  return model;
}

SvmCascadeModel svm_cascade_train(const FeatureMatrix& x, std::span<const Grade> y, const SvmParams& params) {
  params.validate();
  require_training_set(x, y.size());
  std::array<bool, kGradeCount> present{};
  for (const auto g : y) present[index_of(g)] = true;
  for (std::size_t c = 0; c < kGradeCount; ++c) {
    if (!present[c]) {
      throw std::invalid_argument("svm_cascade_train: grade " + std::string(to_string(static_cast<Grade>(c))) +
                                  " missing from training data");
    }
  }

  SvmCascadeModel model;
  model.params = params;
  model.dimension = x.cols();

  std::vector<int> labels(y.size());
  std::ranges::transform(y, labels.begin(), [](Grade g) { return g == Grade::Healthy ? -1 : 1; });
  model.healthy_vs_dr = svm_train_binary(x, labels, params, 1);

  std::vector<std::size_t> dr_rows;
  std::vector<std::size_t> npdr_rows;
  for (std::size_t r = 0; r < y.size(); ++r) {
    if (y[r] != Grade::Healthy) dr_rows.push_back(r);
    if (y[r] == Grade::Mild || y[r] == Grade::Moderate || y[r] == Grade::Severe) npdr_rows.push_back(r);
  }
  labels.clear();
  for (const auto r : dr_rows) labels.push_back(y[r] == Grade::Proliferative ? 1 : -1);
  model.npdr_vs_pdr = svm_train_binary(x.select(dr_rows), labels, params, 2);

  const FeatureMatrix npdr = x.select(npdr_rows);
  for (std::size_t k = 0; k < 3; ++k) {
    const auto target = static_cast<Grade>(k + 1);
    labels.clear();
    for (const auto r : npdr_rows) labels.push_back(y[r] == target ? 1 : -1);
    model.npdr_grades[k] = svm_train_binary(npdr, labels, params, 3 + k);
  }
  return model;
}

Grade svm_cascade_predict(const SvmCascadeModel& model, std::span<const double> x) {
  if (model.healthy_vs_dr.decision(x) <= 0.0) return Grade::Healthy;
  if (model.npdr_vs_pdr.decision(x) > 0.0) return Grade::Proliferative;
  std::size_t best = 0;
  double best_margin = model.npdr_grades[0].decision(x);
  for (std::size_t k = 1; k < 3; ++k) {
    const double m = model.npdr_grades[k].decision(x);
    if (m > best_margin) {
      best = k;
      best_margin = m;
    }
  }
  return static_cast<Grade>(best + 1);
}

}  // namespace fundus
