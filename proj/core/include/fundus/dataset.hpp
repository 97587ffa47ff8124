#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fundus/classifiers.hpp"
#include "fundus/features.hpp"

namespace fundus {

class DataFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// `image,level` rows with level in 0..4; a leading header row is optional.
/// Ids are matched against image file stems.
std::map<std::string, Grade> read_labels_csv(const std::filesystem::path& path);
std::map<std::string, Grade> read_labels_csv(std::istream& in, const std::string& source = "labels");

/// Feature cache: one labeled row per image.
struct FeatureTable {
  std::vector<std::string> ids;
  std::vector<Grade> labels;
  FeatureMatrix x;

  std::size_t rows() const noexcept { return ids.size(); }
};

/// Header `image,label,f0,...,f{d-1}`; numbers in shortest round-trip form.
void write_feature_csv(std::ostream& out, const FeatureTable& table);
void write_feature_csv(const std::filesystem::path& path, const FeatureTable& table);

FeatureTable read_feature_csv(std::istream& in, const std::string& source = "features");
FeatureTable read_feature_csv(const std::filesystem::path& path);

}  // namespace fundus
