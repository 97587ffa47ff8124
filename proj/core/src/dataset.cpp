#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string_view>

#include "fundus/dataset.hpp"
#include "fundus/model.hpp"

namespace fundus {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    out.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(const std::string& source, std::size_t line_no, const std::string& what) {
  throw DataFormatError(source + ":" + std::to_string(line_no) + ": " + what);
}

std::optional<Grade> parse_level(std::string_view text) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return grade_from_level(v);
}

bool blank(std::string_view line) { return trim(line).empty() || trim(line) == "\r"; }

}  // namespace

std::map<std::string, Grade> read_labels_csv(std::istream& in, const std::string& source) {
  std::map<std::string, Grade> labels;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (blank(line)) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 2) fail(source, line_no, "expected 2 fields 'image,level', found " + std::to_string(fields.size()));
    const auto id = trim(fields[0]);
    const auto level = trim(fields[1]);
    if (line_no == 1 && id == "image" && level == "level") continue;
    if (id.empty()) fail(source, line_no, "empty image id");
    const auto grade = parse_level(level);
    if (!grade) fail(source, line_no, "level '" + std::string(level) + "' is not an integer in 0..4");
    if (!labels.emplace(std::string(id), *grade).second) {
      fail(source, line_no, "duplicate image id '" + std::string(id) + "'");
    }
  }
  return labels;
}

std::map<std::string, Grade> read_labels_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataFormatError("cannot open labels file " + path.string());
  return read_labels_csv(in, path.string());
}

void write_feature_csv(std::ostream& out, const FeatureTable& table) {
  out << "image,label";
  for (std::size_t j = 0; j < table.x.cols(); ++j) out << ",f" << j;
  out << '\n';
  for (std::size_t i = 0; i < table.rows(); ++i) {
    out << table.ids[i] << ',' << index_of(table.labels[i]);
    for (const double v : table.x.row(i)) out << ',' << format_double(v);
    out << '\n';
  }
}

void write_feature_csv(const std::filesystem::path& path, const FeatureTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write feature file " + path.string());
  write_feature_csv(out, table);
  if (!out) throw std::runtime_error("write failed for feature file " + path.string());
}

FeatureTable read_feature_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) fail(source, 1, "missing header");
  const auto header = split_fields(line);
  if (header.size() < 3 || header[0] != "image" || header[1] != "label") {
    fail(source, 1, "header must start with 'image,label' followed by feature columns");
  }
  for (std::size_t j = 2; j < header.size(); ++j) {
    if (header[j] != "f" + std::to_string(j - 2)) fail(source, 1, "unexpected column '" + std::string(header[j]) + "'");
  }
  FeatureTable table;
  table.x = FeatureMatrix(header.size() - 2);
  std::vector<double> row(header.size() - 2);
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      fail(source, line_no, "expected " + std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()));
    }
    if (fields[0].empty()) fail(source, line_no, "empty image id");
    const auto grade = parse_level(fields[1]);
    if (!grade) fail(source, line_no, "label '" + std::string(fields[1]) + "' is not an integer in 0..4");
    for (std::size_t j = 0; j < row.size(); ++j) {
      const auto v = parse_double(fields[j + 2]);
      if (!v) fail(source, line_no, "invalid number '" + std::string(fields[j + 2]) + "'");
      row[j] = *v;
    }
    table.ids.emplace_back(fields[0]);
    table.labels.push_back(*grade);
    table.x.push_row(row);
  }
  return table;
}

FeatureTable read_feature_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataFormatError("cannot open feature file " + path.string());
  return read_feature_csv(in, path.string());
}

}  // namespace fundus
