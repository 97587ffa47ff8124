#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fundus/config.hpp"
#include "fundus/dataset.hpp"
#include "fundus/evaluation.hpp"
#include "fundus/features.hpp"
#include "fundus/lesions.hpp"
#include "fundus/model.hpp"
#include "fundus/raster.hpp"

namespace fundus {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;  // some inputs were skipped
inline constexpr int kExitFailure = 2;  // invalid usage, config or inputs; nothing useful produced

struct ImageEntry {
  std::string id;  // file stem
  std::filesystem::path path;
};

/// Image files directly inside `dir`, sorted by id. A second file with an
/// already seen stem is reported to `log` and dropped, which sets *skipped.
std::vector<ImageEntry> list_images(const std::filesystem::path& dir, std::ostream& log, bool* skipped = nullptr);

struct ImageAnalysis {
  GrayRaster green;  // green channel of the resized image
  LesionSet lesions;
  FeatureVector features;
};

/// Resize to the configured size, segment the three lesion types and build
/// the feature vector.
ImageAnalysis analyze_image(const RgbRaster& img, const PipelineConfig& config, const StageSink& sink = {});

/// One JSON-lines record: {image, exudate_area, vessel_area, ma_area, ma_count}.
std::string lesion_record_json(std::string_view image_id, const LesionSet& lesions);

/// Fits the scaler on `x`, then trains the configured classifier on the
/// scaled rows.
TrainedModel train_model(const FeatureMatrix& x, std::span<const Grade> y, const PipelineConfig& config);

struct Evaluation {
  TrainedModel model;
  SplitIndices split;
  ConfusionMatrix confusion;
  Metrics metrics;
};

/// Seeded split, training on the train rows only, scoring on the test rows.
Evaluation evaluate_table(const FeatureTable& table, const PipelineConfig& config);

std::string format_report_json(const Evaluation& evaluation, const PipelineConfig& config);
std::string format_report_text(const Evaluation& evaluation, const PipelineConfig& config);

// Subcommands. Each validates the config, reports problems to `log` and
// returns one of the exit codes above.

/// Writes <id>.exudate.pgm, <id>.vessel.pgm, <id>.ma.pgm and lesions.jsonl.
int cmd_segment(const std::filesystem::path& input_dir, const std::filesystem::path& output_dir,
                const PipelineConfig& config, std::ostream& log);

int cmd_extract_features(const std::filesystem::path& input_dir, const std::filesystem::path& labels_csv,
                         const std::filesystem::path& out_csv, const PipelineConfig& config, std::ostream& log);

/// Trains on the same train partition cmd_evaluate uses, or on every row when
/// `all_rows` is set.
int cmd_train(const std::filesystem::path& features_csv, const std::filesystem::path& model_out,
              const PipelineConfig& config, std::ostream& log, bool all_rows = false);

/// Empty paths are not written.
struct EvaluateOutputs {
  std::filesystem::path report_json;
  std::filesystem::path report_text;
  std::filesystem::path model;
};

/// Prints the text report to `out`.
int cmd_evaluate(const std::filesystem::path& features_csv, const PipelineConfig& config,
                 const EvaluateOutputs& outputs, std::ostream& out, std::ostream& log);

/// `input` is an image, a directory of images or a feature CSV. Prints
/// `image,level` rows to `out`.
int cmd_predict(const std::filesystem::path& model_path, const std::filesystem::path& input,
                const PipelineConfig& config, std::ostream& out, std::ostream& log);

/// segment + extract-features + evaluate in one pass. Layout of output_dir:
/// masks/, lesions.jsonl, features.csv, model.txt, report.json, report.txt,
/// config.txt (and stages/ with dump_stages).
int cmd_run_all(const std::filesystem::path& input_dir, const std::filesystem::path& labels_csv,
                const std::filesystem::path& output_dir, const PipelineConfig& config, std::ostream& out,
                std::ostream& log);

}  // namespace fundus
