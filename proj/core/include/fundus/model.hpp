#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "fundus/classifiers.hpp"
#include "fundus/features.hpp"

namespace fundus {

enum class ClassifierKind { RandomForest, Svm, NaiveBayes };

std::string_view to_string(ClassifierKind kind) noexcept;
std::optional<ClassifierKind> parse_classifier_kind(std::string_view name) noexcept;

/// A classifier together with the scaler fitted on its training rows, so
/// predictions apply exactly the transform used during training.
struct TrainedModel {
  ScalerModel scaler;
  std::variant<RandomForestModel, SvmCascadeModel, GaussianNBModel> classifier;

  ClassifierKind kind() const noexcept;
  std::size_t dimension() const noexcept { return scaler.dimension(); }
};

/// Classifies unscaled features.
Grade predict(const TrainedModel& model, std::span<const double> raw_features);

class ModelFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void save_model(std::ostream& out, const TrainedModel& model);
TrainedModel load_model(std::istream& in);
void save_model(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel load_model(const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Strict full-token parse; nullopt on trailing garbage or overflow.
std::optional<double> parse_double(std::string_view text) noexcept;

}  // namespace fundus
