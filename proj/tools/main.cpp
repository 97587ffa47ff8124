// fundusgrade: lesion segmentation, feature extraction and retinopathy
// grading from the command line.

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fundus/config.hpp"
#include "fundus/pipeline.hpp"

namespace {

struct Flag {
  const char* name;  // command-line spelling
  const char* key;   // config key
  const char* help;
};

// Shorthands for the most common settings; everything else goes through --set.
constexpr Flag kFlags[] = {
    {"--clahe-tiles", "clahe_tiles", "CLAHE tile grid N (N x N)"},
    {"--clahe-clip", "clahe_clip", "CLAHE clip limit (>= 1)"},
    {"--median-k", "median_k", "median window size (odd)"},
    {"--disc-percentile", "disc_percentile", "red percentile that seeds the optic disc"},
    {"--disc-dilate", "disc_dilate", "optic disc dilation size"},
    {"--exudate-threshold", "exudate_threshold", "exudate intensity threshold"},
    {"--vessel-threshold", "vessel_threshold", "vessel residual threshold"},
    {"--vessel-min-area", "vessel_min_area", "smallest vessel component kept (pixels)"},
    {"--hist-bins", "hist_bins", "histogram bins per lesion (divides 256)"},
    {"--classifier", "classifier", "rf, svm or nb"},
    {"--seed", "seed", "seed for the split and the classifiers"},
    {"--train-frac", "train_frac", "training fraction of the split"},
    {"--trees", "rf_trees", "random forest size"},
    {"--threads", "threads", "worker threads (0 = all cores)"},
};

struct ConfigOptions {
  std::string config_path;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  std::vector<std::string> settings;
  bool dump_stages = false;

  void attach(CLI::App* app) {
    app->add_option("-c,--config", config_path, "key = value config file (flags override it)")
        ->check(CLI::ExistingFile);
    for (const auto& f : kFlags) options[f.key] = app->add_option(f.name, values[f.key], f.help);
    app->add_option("--set", settings, "override any config key: --set key=value (repeatable)");
    app->add_flag("--dump-stages", dump_stages, "also write every intermediate image under stages/");
  }

  fundus::PipelineConfig build() const {
    fundus::PipelineConfig config;
    if (!config_path.empty()) fundus::apply_config_file(config, config_path);
    for (const auto& s : settings) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw fundus::ConfigError("--set expects key=value, got '" + s + "'");
      fundus::apply_setting(config, s.substr(0, eq), s.substr(eq + 1));
    }
    for (const auto& [key, opt] : options) {
      if (opt->count() == 0) continue;
      if (key == "clahe_tiles") {
        fundus::apply_setting(config, "clahe_tiles_x", values.at(key));
        fundus::apply_setting(config, "clahe_tiles_y", values.at(key));
      } else {
        fundus::apply_setting(config, key, values.at(key));
      }
    }
    if (dump_stages) config.dump_stages = true;
    config.validate();
    for (const auto& note : config.notes()) std::cerr << "note: " << note << '\n';
    return config;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diabetic retinopathy lesion segmentation and grading"};
  app.require_subcommand(1);
  ConfigOptions opts;
  std::string input, output, labels, features, model_path, report_json, report_text, model_out;
  bool all_rows = false;

  auto* segment = app.add_subcommand("segment", "write lesion masks and lesions.jsonl for a directory of images");
  segment->add_option("input_dir", input)->required()->check(CLI::ExistingDirectory);
  segment->add_option("output_dir", output)->required();

  auto* extract = app.add_subcommand("extract-features", "build the feature CSV for labeled images");
  extract->add_option("input_dir", input)->required()->check(CLI::ExistingDirectory);
  extract->add_option("labels_csv", labels, "image,level rows")->required()->check(CLI::ExistingFile);
  extract->add_option("out_csv", output)->required();

  auto* train = app.add_subcommand("train", "train a classifier from a feature CSV");
  train->add_option("features_csv", features)->required()->check(CLI::ExistingFile);
  train->add_option("model_out", output)->required();
  train->add_flag("--all-rows", all_rows, "train on every row instead of the training partition");

  auto* evaluate = app.add_subcommand("evaluate", "split, train and report test metrics");
  evaluate->add_option("features_csv", features)->required()->check(CLI::ExistingFile);
  evaluate->add_option("--report-json", report_json, "write the JSON metrics report here");
  evaluate->add_option("--report-text", report_text, "write the text report here");
  evaluate->add_option("--model-out", model_out, "save the evaluated model here");

  auto* predict = app.add_subcommand("predict", "grade images or feature rows with a saved model");
  predict->add_option("model", model_path)->required()->check(CLI::ExistingFile);
  predict->add_option("input", input, "image, image directory or feature CSV")->required()->check(CLI::ExistingPath);

  auto* run_all = app.add_subcommand("run-all", "segment, extract features, train and evaluate in one go");
  run_all->add_option("input_dir", input)->required()->check(CLI::ExistingDirectory);
  run_all->add_option("labels_csv", labels)->required()->check(CLI::ExistingFile);
  run_all->add_option("output_dir", output)->required();

  auto* show = app.add_subcommand("show-config", "print the effective configuration");

  for (auto* sub : {segment, extract, train, evaluate, predict, run_all, show}) opts.attach(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? fundus::kExitOk : fundus::kExitFailure;
  }

  fundus::PipelineConfig config;
  try {
    config = opts.build();
  } catch (const fundus::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return fundus::kExitFailure;
  }

  if (*segment) return fundus::cmd_segment(input, output, config, std::cerr);
  if (*extract) return fundus::cmd_extract_features(input, labels, output, config, std::cerr);
  if (*train) return fundus::cmd_train(features, output, config, std::cerr, all_rows);
  if (*evaluate) {
    return fundus::cmd_evaluate(features, config, {report_json, report_text, model_out}, std::cout, std::cerr);
  }
  if (*predict) return fundus::cmd_predict(model_path, input, config, std::cout, std::cerr);
  if (*run_all) return fundus::cmd_run_all(input, labels, output, config, std::cout, std::cerr);
  std::cout << fundus::format_config(config);
  return fundus::kExitOk;
}
