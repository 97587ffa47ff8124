#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>
#include <utility>

#include "json.hpp"

#include "fundus/image_io.hpp"
#include "fundus/pipeline.hpp"

namespace fundus {

namespace fs = std::filesystem;

namespace {

using StageList = std::vector<std::pair<std::string, GrayRaster>>;

struct Outcome {
  std::optional<ImageAnalysis> analysis;
  std::string error;
  StageList stages;
};

// Decodes and analyzes images on worker threads in fixed-size batches, then
// hands the results to `consume` in input order.
void for_each_analysis(const std::vector<ImageEntry>& entries, const PipelineConfig& config, bool capture_stages,
                       const std::function<void(const ImageEntry&, Outcome&)>& consume) {
  const unsigned threads = config.effective_threads();
  const std::size_t batch = std::max<std::size_t>(1, 8 * static_cast<std::size_t>(threads));
  std::vector<Outcome> outcomes;
  for (std::size_t start = 0; start < entries.size(); start += batch) {
    const std::size_t end = std::min(entries.size(), start + batch);
    outcomes.assign(end - start, Outcome{});
    std::atomic<std::size_t> next{start};
    const auto work = [&] {
      for (std::size_t i; (i = next.fetch_add(1)) < end;) {
        Outcome& o = outcomes[i - start];
        try {
          const RgbRaster img = read_rgb(entries[i].path);
          StageSink sink;
          if (capture_stages) {
            sink = [&o](std::string_view name, const GrayRaster& stage) { o.stages.emplace_back(name, stage); };
          }
          o.analysis = analyze_image(img, config, sink);
        } catch (const std::exception& e) {
          o.error = e.what();
        }
      }
    };
    const unsigned n_workers = static_cast<unsigned>(std::min<std::size_t>(threads, end - start));
    if (n_workers <= 1) {
      work();
    } else {
      std::vector<std::jthread> pool;
      pool.reserve(n_workers);
      for (unsigned t = 0; t < n_workers; ++t) pool.emplace_back(work);
    }
    for (std::size_t i = start; i < end; ++i) consume(entries[i], outcomes[i - start]);
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw std::runtime_error("cannot create directory " + dir.string());
}

void write_masks(const fs::path& dir, const std::string& id, const LesionSet& lesions) {
  write_pgm(dir / (id + ".exudate.pgm"), lesions.exudate.mask);
  write_pgm(dir / (id + ".vessel.pgm"), lesions.vessel.mask);
  write_pgm(dir / (id + ".ma.pgm"), lesions.microaneurysm.mask);
}

void write_stages(const fs::path& dir, const std::string& id, const StageList& stages) {
  for (const auto& [name, img] : stages) write_pgm(dir / (id + "." + name + ".pgm"), img);
}

void check_config(const PipelineConfig& config) { config.validate(); }

int fail(std::ostream& log, const std::string& what) {
  log << "error: " << what << '\n';
  return kExitFailure;
}

std::string fixed(double v, int digits = 4) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

FeatureTable select_rows(const FeatureTable& t, std::span<const std::size_t> rows) {
  FeatureTable out;
  out.x = t.x.select(rows);
  for (const auto i : rows) {
    out.ids.push_back(t.ids[i]);
    out.labels.push_back(t.labels[i]);
  }
  return out;
}

void check_dimension(const FeatureTable& table, const PipelineConfig& config) {
  const std::size_t expected = feature_dimension(config.hist_bins);
  if (table.x.cols() != expected) {
    throw std::invalid_argument("feature table has " + std::to_string(table.x.cols()) + " columns but hist_bins " +
                                std::to_string(config.hist_bins) + " implies " + std::to_string(expected));
  }
}

}  // namespace

std::vector<ImageEntry> list_images(const fs::path& dir, std::ostream& log, bool* skipped) {
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && has_image_extension(e.path())) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<ImageEntry> out;
  std::set<std::string> seen;
  for (const auto& f : files) {
    std::string id = f.stem().string();
    if (!seen.insert(id).second) {
      log << "warning: skipping " << f.string() << ": another file already has id '" << id << "'\n";
      if (skipped) *skipped = true;
      continue;
    }
    out.push_back({std::move(id), f});
  }
  std::sort(out.begin(), out.end(), [](const ImageEntry& a, const ImageEntry& b) { return a.id < b.id; });
  return out;
}

ImageAnalysis analyze_image(const RgbRaster& img, const PipelineConfig& config, const StageSink& sink) {
  const bool resize = img.width() != config.resize_width || img.height() != config.resize_height;
  const RgbRaster scaled = resize ? resize_bilinear(img, config.resize_width, config.resize_height) : img;
  ImageAnalysis out;
  out.green = extract_channel(scaled, Channel::Green);
  if (sink) sink("green", out.green);
  out.lesions = detect_all(scaled, config.lesions, sink);
  out.features = assemble_features(out.lesions.exudate, out.lesions.vessel, out.lesions.microaneurysm, out.green,
                                   config.hist_bins);
  return out;
}

std::string lesion_record_json(std::string_view image_id, const LesionSet& lesions) {
  nlohmann::ordered_json j;
  j["image"] = image_id;
  j["exudate_area"] = lesions.exudate.area;
  j["vessel_area"] = lesions.vessel.area;
  j["ma_area"] = lesions.microaneurysm.area;
  j["ma_count"] = lesions.microaneurysm.component_count;
  return j.dump();
}

TrainedModel train_model(const FeatureMatrix& x, std::span<const Grade> y, const PipelineConfig& config) {
  TrainedModel model;
  model.scaler = scaler_fit(x);
  const FeatureMatrix scaled = scaler_transform(model.scaler, x);
  switch (config.classifier) {
    case ClassifierKind::RandomForest:
      model.classifier = rf_train(scaled, y, config.effective_rf());
      break;
    case ClassifierKind::Svm:
      model.classifier = svm_cascade_train(scaled, y, config.effective_svm());
      break;
    case ClassifierKind::NaiveBayes:
      model.classifier = nb_train(scaled, y);
      break;
  }
  return model;
}

Evaluation evaluate_table(const FeatureTable& table, const PipelineConfig& config) {
  check_dimension(table, config);
  Evaluation ev;
  ev.split = split_indices(table.rows(), config.train_frac, config.seed);
  if (ev.split.test.empty()) {
    throw std::invalid_argument("too few rows (" + std::to_string(table.rows()) + ") to hold out a test partition");
  }
  const FeatureTable train = select_rows(table, ev.split.train);
  const FeatureTable test = select_rows(table, ev.split.test);
  ev.model = train_model(train.x, train.labels, config);
  std::vector<Grade> predicted;
  predicted.reserve(test.rows());
  for (std::size_t i = 0; i < test.rows(); ++i) predicted.push_back(predict(ev.model, test.x.row(i)));
  ev.confusion = confusion_matrix(test.labels, predicted);
  ev.metrics = compute_metrics(ev.confusion);
  return ev;
}

std::string format_report_json(const Evaluation& ev, const PipelineConfig& config) {
  nlohmann::ordered_json j;
  j["classifier"] = to_string(config.classifier);
  j["seed"] = config.seed;
  j["train_size"] = ev.split.train.size();
  j["test_size"] = ev.split.test.size();
  j["accuracy"] = ev.metrics.accuracy;
  j["macro_sensitivity"] = ev.metrics.macro_sensitivity;
  j["macro_specificity"] = ev.metrics.macro_specificity;
  auto per_class = nlohmann::ordered_json::array();
  auto confusion = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < kGradeCount; ++c) {
    std::uint64_t support = 0;
    for (const auto v : ev.confusion.counts[c]) support += v;
    nlohmann::ordered_json row;
    row["grade"] = to_string(static_cast<Grade>(c));
    row["level"] = c;
    row["support"] = support;
    row["sensitivity"] = ev.metrics.sensitivity[c];
    row["specificity"] = ev.metrics.specificity[c];
    row["degenerate"] = ev.metrics.degenerate[c];
    per_class.push_back(std::move(row));
    confusion.push_back(ev.confusion.counts[c]);
  }
  j["per_class"] = std::move(per_class);
  j["confusion"] = std::move(confusion);
  return j.dump(2) + "\n";
}

std::string format_report_text(const Evaluation& ev, const PipelineConfig& config) {
  std::ostringstream out;
  out << "classifier: " << to_string(config.classifier) << "  seed: " << config.seed << "  train/test: "
      << ev.split.train.size() << "/" << ev.split.test.size() << '\n';
  out << "accuracy:          " << fixed(ev.metrics.accuracy) << '\n';
  out << "macro sensitivity: " << fixed(ev.metrics.macro_sensitivity) << '\n';
  out << "macro specificity: " << fixed(ev.metrics.macro_specificity) << "\n\n";
  char line[128];
  std::snprintf(line, sizeof line, "%-10s %8s %12s %12s\n", "grade", "support", "sensitivity", "specificity");
  out << line;
  for (std::size_t c = 0; c < kGradeCount; ++c) {
    std::uint64_t support = 0;
    for (const auto v : ev.confusion.counts[c]) support += v;
    std::snprintf(line, sizeof line, "%-10s %8llu %12s %12s%s\n", std::string(to_string(static_cast<Grade>(c))).c_str(),
                  static_cast<unsigned long long>(support), fixed(ev.metrics.sensitivity[c]).c_str(),
                  fixed(ev.metrics.specificity[c]).c_str(), ev.metrics.degenerate[c] ? "  (degenerate)" : "");
    out << line;
  }
  out << "\nconfusion (rows actual, columns predicted)\n";
  for (std::size_t r = 0; r < kGradeCount; ++r) {
    std::snprintf(line, sizeof line, "%-10s", std::string(to_string(static_cast<Grade>(r))).c_str());
    out << line;
    for (const auto v : ev.confusion.counts[r]) {
      std::snprintf(line, sizeof line, " %7llu", static_cast<unsigned long long>(v));
      out << line;
    }
    out << '\n';
  }
  return out.str();
}

int cmd_segment(const fs::path& input_dir, const fs::path& output_dir, const PipelineConfig& config,
                std::ostream& log) {
  try {
    check_config(config);
    bool skipped = false;
    const auto entries = list_images(input_dir, log, &skipped);
    if (entries.empty()) return fail(log, "no images found in " + input_dir.string());
    std::string records;
    bool any = false;
    bool dir_ready = false;
    for_each_analysis(entries, config, config.dump_stages, [&](const ImageEntry& e, Outcome& o) {
      if (!o.analysis) {
        log << "warning: skipping " << e.path.string() << ": " << o.error << '\n';
        skipped = true;
        return;
      }
      if (!dir_ready) {
        ensure_directory(output_dir);
        if (config.dump_stages) ensure_directory(output_dir / "stages");
        dir_ready = true;
      }
      write_masks(output_dir, e.id, o.analysis->lesions);
      if (config.dump_stages) write_stages(output_dir / "stages", e.id, o.stages);
      records += lesion_record_json(e.id, o.analysis->lesions) + "\n";
      any = true;
    });
    if (!any) return fail(log, "no decodable images in " + input_dir.string());
    write_text(output_dir / "lesions.jsonl", records);
    return skipped ? kExitPartial : kExitOk;
  } catch (const std::exception& e) {
    return fail(log, e.what());
  }
}

int cmd_extract_features(const fs::path& input_dir, const fs::path& labels_csv, const fs::path& out_csv,
                         const PipelineConfig& config, std::ostream& log) {
  try {
    check_config(config);
    const auto labels = read_labels_csv(labels_csv);
    bool skipped = false;
    const auto all = list_images(input_dir, log, &skipped);
    if (all.empty()) return fail(log, "no images found in " + input_dir.string());
    std::vector<ImageEntry> entries;
    for (const auto& e : all) {
      if (labels.count(e.id)) {
        entries.push_back(e);
      } else {
        log << "warning: skipping " << e.path.string() << ": no label for '" << e.id << "'\n";
        skipped = true;
      }
    }
    FeatureTable table;
    table.x = FeatureMatrix(feature_dimension(config.hist_bins));
    for_each_analysis(entries, config, false, [&](const ImageEntry& e, Outcome& o) {
      if (!o.analysis) {
        log << "warning: skipping " << e.path.string() << ": " << o.error << '\n';
        skipped = true;
        return;
      }
      table.ids.push_back(e.id);
      table.labels.push_back(labels.at(e.id));
      table.x.push_row(o.analysis->features);
    });
    if (table.rows() == 0) return fail(log, "no labeled, decodable images in " + input_dir.string());
    write_feature_csv(out_csv, table);
    return skipped ? kExitPartial : kExitOk;
  } catch (const std::exception& e) {
    return fail(log, e.what());
  }
}

int cmd_train(const fs::path& features_csv, const fs::path& model_out, const PipelineConfig& config,
              std::ostream& log, bool all_rows) {
  try {
    check_config(config);
    const FeatureTable table = read_feature_csv(features_csv);
    check_dimension(table, config);
    if (table.rows() == 0) return fail(log, "feature table " + features_csv.string() + " has no rows");
    TrainedModel model;
    if (all_rows) {
      model = train_model(table.x, table.labels, config);
    } else {
      const SplitIndices split = split_indices(table.rows(), config.train_frac, config.seed);
      const FeatureTable train = select_rows(table, split.train);
      model = train_model(train.x, train.labels, config);
    }
    save_model(model_out, model);
    return kExitOk;
  } catch (const std::exception& e) {
    return fail(log, e.what());
  }
}

int cmd_evaluate(const fs::path& features_csv, const PipelineConfig& config, const EvaluateOutputs& outputs,
                 std::ostream& out, std::ostream& log) {
  try {
    check_config(config);
    const FeatureTable table = read_feature_csv(features_csv);
    const Evaluation ev = evaluate_table(table, config);
    if (!outputs.model.empty()) save_model(outputs.model, ev.model);
    if (!outputs.report_json.empty()) write_text(outputs.report_json, format_report_json(ev, config));
    const std::string text = format_report_text(ev, config);
    if (!outputs.report_text.empty()) write_text(outputs.report_text, text);
    out << text;
    return kExitOk;
  } catch (const std::exception& e) {
    return fail(log, e.what());
  }
}

int cmd_predict(const fs::path& model_path, const fs::path& input, const PipelineConfig& config, std::ostream& out,
                std::ostream& log) {
  try {
    check_config(config);
    const TrainedModel model = load_model(model_path);
    std::string ext = input.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    std::ostringstream rows;
    bool skipped = false;
    if (ext == ".csv") {
      const FeatureTable table = read_feature_csv(input);
      if (table.x.cols() != model.dimension()) {
        return fail(log, "model expects " + std::to_string(model.dimension()) + " features, table has " +
                             std::to_string(table.x.cols()));
      }
      for (std::size_t i = 0; i < table.rows(); ++i) {
        rows << table.ids[i] << ',' << index_of(predict(model, table.x.row(i))) << '\n';
      }
    } else {
      if (model.dimension() != feature_dimension(config.hist_bins)) {
        return fail(log, "model expects " + std::to_string(model.dimension()) + " features but hist_bins " +
                             std::to_string(config.hist_bins) + " yields " +
                             std::to_string(feature_dimension(config.hist_bins)));
      }
      std::vector<ImageEntry> entries;
      if (fs::is_directory(input)) {
        entries = list_images(input, log, &skipped);
      } else {
        entries.push_back({input.stem().string(), input});
      }
      if (entries.empty()) return fail(log, "no images found in " + input.string());
      bool any = false;
      for_each_analysis(entries, config, false, [&](const ImageEntry& e, Outcome& o) {
        if (!o.analysis) {
          log << "warning: skipping " << e.path.string() << ": " << o.error << '\n';
          skipped = true;
          return;
        }
        rows << e.id << ',' << index_of(predict(model, o.analysis->features)) << '\n';
        any = true;
      });
      if (!any) return fail(log, "no decodable images in " + input.string());
    }
    out << "image,level\n" << rows.str();
    return skipped ? kExitPartial : kExitOk;
  } catch (const std::exception& e) {
    return fail(log, e.what());
  }
}

int cmd_run_all(const fs::path& input_dir, const fs::path& labels_csv, const fs::path& output_dir,
                const PipelineConfig& config, std::ostream& out, std::ostream& log) {
  try {
    check_config(config);
    const auto labels = read_labels_csv(labels_csv);
    bool skipped = false;
    const auto entries = list_images(input_dir, log, &skipped);
    if (entries.empty()) return fail(log, "no images found in " + input_dir.string());

    ensure_directory(output_dir / "masks");
    if (config.dump_stages) ensure_directory(output_dir / "stages");
    std::string records;
    FeatureTable table;
    table.x = FeatureMatrix(feature_dimension(config.hist_bins));
    bool any = false;
    for_each_analysis(entries, config, config.dump_stages, [&](const ImageEntry& e, Outcome& o) {
      if (!o.analysis) {
        log << "warning: skipping " << e.path.string() << ": " << o.error << '\n';
        skipped = true;
        return;
      }
      any = true;
      write_masks(output_dir / "masks", e.id, o.analysis->lesions);
      if (config.dump_stages) write_stages(output_dir / "stages", e.id, o.stages);
      records += lesion_record_json(e.id, o.analysis->lesions) + "\n";
      const auto label = labels.find(e.id);
      if (label == labels.end()) {
        log << "warning: no label for '" << e.id << "'; excluded from features\n";
        skipped = true;
        return;
      }
      table.ids.push_back(e.id);
      table.labels.push_back(label->second);
      table.x.push_row(o.analysis->features);
    });
    if (!any) return fail(log, "no decodable images in " + input_dir.string());
    write_text(output_dir / "lesions.jsonl", records);
    write_text(output_dir / "config.txt", format_config(config));
    if (table.rows() == 0) return fail(log, "no labeled images to train on");
    write_feature_csv(output_dir / "features.csv", table);

    const Evaluation ev = evaluate_table(table, config);
    save_model(output_dir / "model.txt", ev.model);
    write_text(output_dir / "report.json", format_report_json(ev, config));
    const std::string text = format_report_text(ev, config);
    write_text(output_dir / "report.txt", text);
    out << text;
    return skipped ? kExitPartial : kExitOk;
  } catch (const std::exception& e) {
    return fail(log, e.what());
  }
}

}  // namespace fundus
