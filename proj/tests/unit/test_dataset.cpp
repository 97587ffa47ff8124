#include <gtest/gtest.h>

#include <sstream>

#include "fundus/dataset.hpp"
#include "generators.hpp"

namespace fundus {
namespace {

std::map<std::string, Grade> labels(const std::string& text) {
  std::istringstream in(text);
  return read_labels_csv(in, "labels.csv");
}

std::string error_of(const std::string& text) {
  try {
    labels(text);
  } catch (const DataFormatError& e) {
    return e.what();
  }
  return {};
}

TEST(LabelsCsv, ParsesWithOrWithoutHeader) {
  const auto a = labels("image,level\n10_left,0\n10_right,4\n");
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a.at("10_right"), Grade::Proliferative);
  const auto b = labels("x,2\r\ny,3\n\n");
  EXPECT_EQ(b.at("x"), Grade::Moderate);
  EXPECT_EQ(b.at("y"), Grade::Severe);
}

TEST(LabelsCsv, ErrorsNameTheLine) {
  EXPECT_NE(error_of("image,level\na,1\nb,7\n").find("labels.csv:3"), std::string::npos);
  EXPECT_NE(error_of("a,1,2\n").find("labels.csv:1"), std::string::npos);
  EXPECT_NE(error_of("a,x\n").find(":1"), std::string::npos);
  EXPECT_NE(error_of("a,1\na,2\n").find(":2"), std::string::npos);
  EXPECT_NE(error_of("a,-1\n"), "");
  EXPECT_NE(error_of(",1\n"), "");
}

TEST(FeatureCsv, RoundTripIsExact) {
  testing::Gen gen(41);
  FeatureTable t;
  t.x = FeatureMatrix(feature_dimension(32));
  for (int r = 0; r < 5; ++r) {
    t.ids.push_back("img_" + std::to_string(r));
    t.labels.push_back(static_cast<Grade>(r % 5));
    std::vector<double> row(t.x.cols());
    for (auto& v : row) v = gen.coin(0.5) ? 0.0 : gen.real() / 3.0;
    t.x.push_row(row);
  }
  std::ostringstream out;
  write_feature_csv(out, t);
  const std::string text = out.str();
  EXPECT_EQ(text.rfind("image,label,f0,f1,", 0), 0u);
  std::istringstream first(text.substr(0, text.find('\n')));
  std::string field;
  int fields = 0;
  while (std::getline(first, field, ',')) ++fields;
  EXPECT_EQ(fields, 101);
  std::istringstream in(text);
  const FeatureTable back = read_feature_csv(in);
  EXPECT_EQ(back.ids, t.ids);
  EXPECT_EQ(back.labels, t.labels);
  ASSERT_EQ(back.x.rows(), t.x.rows());
  for (std::size_t r = 0; r < t.x.rows(); ++r) {
    for (std::size_t c = 0; c < t.x.cols(); ++c) EXPECT_EQ(back.x(r, c), t.x(r, c));
  }
}

TEST(FeatureCsv, RejectsMalformedRows) {
  const auto fails = [](const std::string& text, const std::string& where) {
    std::istringstream in(text);
    try {
      read_feature_csv(in, "f.csv");
      ADD_FAILURE() << "accepted: " << text;
    } catch (const DataFormatError& e) {
      EXPECT_NE(std::string(e.what()).find(where), std::string::npos) << e.what();
    }
  };
  fails("", "f.csv");
  fails("image,label,f0\na,1,0.5,9\n", "f.csv:2");
  fails("image,label,f0\na,9,0.5\n", "f.csv:2");
  fails("image,label,f0\na,1,abc\n", "f.csv:2");
  fails("image,level,f0\na,1,0.5\n", "f.csv:1");
}

}  // namespace
}  // namespace fundus
