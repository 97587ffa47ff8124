#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fundus/classifiers.hpp"

namespace fundus {

GaussianNBModel nb_train(const FeatureMatrix& x, std::span<const Grade> y, std::size_t classes) {
  if (x.empty()) throw std::invalid_argument("nb_train: empty training set");
  if (x.rows() != y.size()) throw std::invalid_argument("nb_train: feature and label counts differ");
  if (classes < 2 || classes > kGradeCount) throw std::invalid_argument("nb_train: class count must be in 2..5");

  const std::size_t d = x.cols();
  const std::size_t n = x.rows();
  GaussianNBModel model;
  model.classes = classes;
  model.dimension = d;
  model.priors.assign(classes, 0.0);
  model.means.assign(classes * d, 0.0);
  model.variances.assign(classes * d, 0.0);

  std::vector<std::size_t> counts(classes, 0);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t c = index_of(y[r]);
    if (c >= classes) throw std::invalid_argument("nb_train: label " + std::to_string(c) + " outside class range");
    ++counts[c];
    for (std::size_t j = 0; j < d; ++j) model.means[c * d + j] += x(r, j);
  }
  for (std::size_t c = 0; c < classes; ++c) {
    if (counts[c] == 0) throw std::invalid_argument("nb_train: class " + std::to_string(c) + " has no training rows");
    model.priors[c] = static_cast<double>(counts[c]) / static_cast<double>(n);
    for (std::size_t j = 0; j < d; ++j) model.means[c * d + j] /= static_cast<double>(counts[c]);
  }
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t c = index_of(y[r]);
    for (std::size_t j = 0; j < d; ++j) {
      const double e = x(r, j) - model.means[c * d + j];
      model.variances[c * d + j] += e * e;
    }
  }
  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t j = 0; j < d; ++j) model.variances[c * d + j] /= static_cast<double>(counts[c]);
  }

  // Floor relative to the widest feature over all rows, pooled across classes.
  double max_var = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t r = 0; r < n; ++r) mean += x(r, j);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t r = 0; r < n; ++r) var += (x(r, j) - mean) * (x(r, j) - mean);
    max_var = std::max(max_var, var / static_cast<double>(n));
  }
  model.var_floor = 1e-9 * (max_var > 0.0 ? max_var : 1.0);
  for (auto& v : model.variances) v = std::max(v, model.var_floor);
  return model;
}

std::vector<double> nb_log_scores(const GaussianNBModel& model, std::span<const double> x) {
  if (x.size() != model.dimension) {
    throw std::invalid_argument("nb_predict: expected " + std::to_string(model.dimension) + " features, got " +
                                std::to_string(x.size()));
  }
  const std::size_t d = model.dimension;
  std::vector<double> scores(model.classes);
  for (std::size_t c = 0; c < model.classes; ++c) {
    double s = std::log(model.priors[c]);
    for (std::size_t j = 0; j < d; ++j) {
      const double var = model.variances[c * d + j];
      const double e = x[j] - model.means[c * d + j];
      s -= 0.5 * (std::log(2.0 * std::numbers::pi * var) + e * e / var);
    }
    scores[c] = s;
  }
  return scores;
}

Grade nb_predict(const GaussianNBModel& model, std::span<const double> x) {
  const auto scores = nb_log_scores(model, x);
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  return static_cast<Grade>(best);
}

}  // namespace fundus
