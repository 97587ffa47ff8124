#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "fundus/config.hpp"
#include "fundus/morphology.hpp"

namespace fundus {

namespace {

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw ConfigError("invalid value '" + std::string(value) + "' for " + std::string(key) + ": expected " +
                    std::string(expected));
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view value) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size()) bad_value(key, value, "an integer");
  return v;
}

double parse_real(std::string_view key, std::string_view value) {
  const auto v = parse_double(value);
  if (!v) bad_value(key, value, "a number");
  return *v;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "1" || value == "true" || value == "on" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "off" || value == "no") return false;
  bad_value(key, value, "true or false");
}

std::uint8_t parse_byte(std::string_view key, std::string_view value) {
  const int v = parse_int<int>(key, value);
  if (v < 0 || v > 255) bad_value(key, value, "an intensity in 0..255");
  return static_cast<std::uint8_t>(v);
}

// "inf" and "unbounded" map to no upper limit.
std::size_t parse_area(std::string_view key, std::string_view value) {
  if (value == "inf" || value == "unbounded") return kUnboundedArea;
  return parse_int<std::size_t>(key, value);
}

std::string area_text(std::size_t area) { return area == kUnboundedArea ? "inf" : std::to_string(area); }

std::vector<int> parse_int_list(std::string_view key, std::string_view value) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= value.size()) {
    const auto comma = value.find(',', pos);
    const auto item = trim(value.substr(pos, comma == std::string_view::npos ? value.npos : comma - pos));
    if (item.empty()) bad_value(key, value, "a comma-separated list of integers");
    out.push_back(parse_int<int>(key, item));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

struct Setting {
  std::string_view key;
  std::function<void(PipelineConfig&, std::string_view key, std::string_view value)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

const std::vector<Setting>& settings() {
  using C = PipelineConfig;
  using V = std::string_view;
  static const std::vector<Setting> table = {
      {"resize_width", [](C& c, V k, V v) { c.resize_width = parse_int<int>(k, v); },
       [](const C& c) { return std::to_string(c.resize_width); }},
      {"resize_height", [](C& c, V k, V v) { c.resize_height = parse_int<int>(k, v); },
       [](const C& c) { return std::to_string(c.resize_height); }},
      {"clahe_tiles_x", [](C& c, V k, V v) { c.lesions.clahe.tiles_x = parse_int<int>(k, v); },
       [](const C& c) { return std::to_string(c.lesions.clahe.tiles_x); }},
      {"clahe_tiles_y", [](C& c, V k, V v) { c.lesions.clahe.tiles_y = parse_int<int>(k, v); },
       [](const C& c) { return std::to_string(c.lesions.clahe.tiles_y); }},
      {"clahe_clip", [](C& c, V k, V v) { c.lesions.clahe.clip_limit = parse_real(k, v); },
       [](const C& c) { return format_double(c.lesions.clahe.clip_limit); }},
      {"median_k", [](C& c, V k, V v) { c.lesions.median_k = parse_int<int>(k, v); },
       [](const C& c) { return std::to_string(c.lesions.median_k); }},
      {"disc_percentile", [](C& c, V k, V v) { c.lesions.disc_percentile = parse_real(k, v); },
       [](const C& c) { return format_double(c.lesions.disc_percentile); }},
      {"disc_dilate", [](C& c, V k, V v) { c.lesions.disc_dilate = parse_int<int>(k, v); },
       [](const C& c) { return std::to_string(c.lesions.disc_dilate); }},
      {"exudate_dilate", [](C& c, V k, V v) { c.lesions.exudate_dilate = parse_int<int>(k, v); },
       [](const C& c) { return std::to_string(c.lesions.exudate_dilate); }},
      {"exudate_threshold", [](C& c, V k, V v) { c.lesions.exudate_threshold = parse_byte(k, v); },
       [](const C& c) { return std::to_string(c.lesions.exudate_threshold); }},
      {"vessel_se", [](C& c, V k, V v) { c.lesions.vessel_se = parse_int_list(k, v); },
       [](const C& c) {
         std::string s;
         for (const int v : c.lesions.vessel_se) s += (s.empty() ? "" : ",") + std::to_string(v);
         return s;
       }},
      {"vessel_threshold", [](C& c, V k, V v) { c.lesions.vessel_threshold = parse_byte(k, v); },
       [](const C& c) { return std::to_string(c.lesions.vessel_threshold); }},
      {"vessel_min_area", [](C& c, V k, V v) { c.lesions.vessel_min_area = parse_area(k, v); },
       [](const C& c) { return area_text(c.lesions.vessel_min_area); }},
      {"vessel_max_area", [](C& c, V k, V v) { c.lesions.vessel_max_area = parse_area(k, v); },
       [](const C& c) { return area_text(c.lesions.vessel_max_area); }},
      {"ma_erode", [](C& c, V k, V v) { c.lesions.ma_erode = parse_int<int>(k, v); },
       [](const C& c) { return std::to_string(c.lesions.ma_erode); }},
      {"ma_close", [](C& c, V k, V v) { c.lesions.ma_close = parse_int<int>(k, v); },
       [](const C& c) { return std::to_string(c.lesions.ma_close); }},
      {"ma_min_area", [](C& c, V k, V v) { c.lesions.ma_min_area = parse_area(k, v); },
       [](const C& c) { return area_text(c.lesions.ma_min_area); }},
      {"ma_max_area", [](C& c, V k, V v) { c.lesions.ma_max_area = parse_area(k, v); },
       [](const C& c) { return area_text(c.lesions.ma_max_area); }},
      {"connectivity",
       [](C& c, V k, V v) {
         const int n = parse_int<int>(k, v);
         if (n != 4 && n != 8) bad_value(k, v, "4 or 8");
         c.lesions.connectivity = n == 4 ? Connectivity::Four : Connectivity::Eight;
       },
       [](const C& c) { return std::to_string(static_cast<int>(c.lesions.connectivity)); }},
      {"hist_bins", [](C& c, V k, V v) { c.hist_bins = parse_int<int>(k, v); },
       [](const C& c) { return std::to_string(c.hist_bins); }},
      {"classifier",
       [](C& c, V k, V v) {
         const auto kind = parse_classifier_kind(v);
         if (!kind) bad_value(k, v, "one of rf, svm, nb");
         c.classifier = *kind;
       },
       [](const C& c) { return std::string(to_string(c.classifier)); }},
      {"seed", [](C& c, V k, V v) { c.seed = parse_int<std::uint64_t>(k, v); },
       [](const C& c) { return std::to_string(c.seed); }},
      {"train_frac", [](C& c, V k, V v) { c.train_frac = parse_real(k, v); },
       [](const C& c) { return format_double(c.train_frac); }},
      {"rf_trees", [](C& c, V k, V v) { c.rf.n_trees = parse_int<std::size_t>(k, v); },
       [](const C& c) { return std::to_string(c.rf.n_trees); }},
      {"rf_max_depth", [](C& c, V k, V v) { c.rf.max_depth = parse_int<std::size_t>(k, v); },
       [](const C& c) { return std::to_string(c.rf.max_depth); }},
      {"rf_max_features", [](C& c, V k, V v) { c.rf.m_features = parse_int<std::size_t>(k, v); },
       [](const C& c) { return std::to_string(c.rf.m_features); }},
      {"rf_bootstrap", [](C& c, V k, V v) { c.rf.bootstrap = parse_bool(k, v); },
       [](const C& c) { return std::string(c.rf.bootstrap ? "true" : "false"); }},
      {"svm_lambda", [](C& c, V k, V v) { c.svm.lambda = parse_real(k, v); },
       [](const C& c) { return format_double(c.svm.lambda); }},
      {"svm_epochs", [](C& c, V k, V v) { c.svm.epochs = parse_int<std::size_t>(k, v); },
       [](const C& c) { return std::to_string(c.svm.epochs); }},
      {"threads", [](C& c, V k, V v) { c.threads = parse_int<unsigned>(k, v); },
       [](const C& c) { return std::to_string(c.threads); }},
      {"dump_stages", [](C& c, V k, V v) { c.dump_stages = parse_bool(k, v); },
       [](const C& c) { return std::string(c.dump_stages ? "true" : "false"); }},
  };
  return table;
}

}  // namespace

void PipelineConfig::validate() const {
  if (resize_width < 1 || resize_height < 1) throw ConfigError("resize dimensions must be positive");
  try {
    lesions.validate();
    effective_rf().validate();
    effective_svm().validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (hist_bins < 1 || hist_bins > 256 || 256 % hist_bins != 0) {
    throw ConfigError("hist_bins must divide 256");
  }
  if (!(train_frac > 0.0 && train_frac < 1.0)) throw ConfigError("train_frac must lie strictly between 0 and 1");
}

std::vector<std::string> PipelineConfig::notes() const {
  std::vector<std::string> out;
  const auto check = [&](std::string_view key, int size) {
    if (size >= 1 && size % 2 == 0) {
      out.push_back(std::string(key) + " " + std::to_string(size) + " is even; using " +
                    std::to_string(promoted_se_size(size)) + "x" + std::to_string(promoted_se_size(size)));
    }
  };
  check("disc_dilate", lesions.disc_dilate);
  check("exudate_dilate", lesions.exudate_dilate);
  for (const int s : lesions.vessel_se) check("vessel_se", s);
  check("ma_erode", lesions.ma_erode);
  check("ma_close", lesions.ma_close);
  return out;
}

RandomForestParams PipelineConfig::effective_rf() const {
  RandomForestParams p = rf;
  p.seed = seed;
  p.threads = effective_threads();
  return p;
}

SvmParams PipelineConfig::effective_svm() const {
  SvmParams p = svm;
  p.seed = seed;
  return p;
}

unsigned PipelineConfig::effective_threads() const noexcept {
  if (threads != 0) return threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

void apply_setting(PipelineConfig& config, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  for (const auto& s : settings()) {
    if (s.key == key) {
      s.set(config, key, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

void apply_config_file(PipelineConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
    try {
      apply_setting(config, text.substr(0, eq), text.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
}

std::string format_config(const PipelineConfig& config) {
  std::ostringstream out;
  for (const auto& s : settings()) out << s.key << " = " << s.get(config) << '\n';
  return out.str();
}

std::vector<std::string_view> config_keys() {
  std::vector<std::string_view> keys;
  for (const auto& s : settings()) keys.push_back(s.key);
  return keys;
}

}  // namespace fundus
