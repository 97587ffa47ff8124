#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fundus/classifiers.hpp"
#include "fundus/lesions.hpp"
#include "fundus/model.hpp"

namespace fundus {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Every tunable of the grading pipeline. `seed` drives the train/test split
/// and both stochastic classifiers.
struct PipelineConfig {
  int resize_width = 350;
  int resize_height = 350;
  LesionParams lesions{};
  int hist_bins = 32;
  ClassifierKind classifier = ClassifierKind::RandomForest;
  RandomForestParams rf{};
  SvmParams svm{};
  std::uint64_t seed = 42;
  double train_frac = 0.75;
  unsigned threads = 1;  // 0 = hardware concurrency
  bool dump_stages = false;

  /// Throws ConfigError describing the first invalid field.
  void validate() const;

  /// Notes about silently adjusted values, e.g. even structuring element
  /// sizes that will run as the next odd size.
  std::vector<std::string> notes() const;

  RandomForestParams effective_rf() const;
  SvmParams effective_svm() const;
  unsigned effective_threads() const noexcept;
};

/// Sets one `key = value` setting. Throws ConfigError on an unknown key or an
/// unparsable value; range checks are left to validate().
void apply_setting(PipelineConfig& config, std::string_view key, std::string_view value);

/// Applies a flat `key = value` file. Blank lines and lines starting with '#'
/// are ignored. Errors name the line.
void apply_config_file(PipelineConfig& config, const std::filesystem::path& path);

/// Every key with its current value in `key = value` form, in a fixed order.
std::string format_config(const PipelineConfig& config);

/// Names accepted by apply_setting.
std::vector<std::string_view> config_keys();

}  // namespace fundus
