#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "fundus/image_io.hpp"
#include "generators.hpp"

namespace fundus {
namespace {

namespace fs = std::filesystem;

class ImageIo : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("fundus_io_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST_F(ImageIo, PngRoundTripRgb) {
  testing::Gen gen(1);
  const RgbRaster img = gen.rgb(17, 9);
  write_png(dir_ / "a.png", img);
  EXPECT_EQ(read_rgb(dir_ / "a.png"), img);
}

TEST_F(ImageIo, PngRoundTripGray) {
  testing::Gen gen(2);
  const GrayRaster img = gen.gray(5, 12);
  write_png(dir_ / "g.png", img);
  EXPECT_EQ(read_gray(dir_ / "g.png"), img);
  const RgbRaster expanded = read_rgb(dir_ / "g.png");
  EXPECT_EQ(extract_channel(expanded, Channel::Blue), img);
}

TEST_F(ImageIo, PpmAndPgmRoundTrip) {
  testing::Gen gen(3);
  const RgbRaster rgb = gen.rgb(8, 3);
  write_ppm(dir_ / "a.ppm", rgb);
  EXPECT_EQ(read_rgb(dir_ / "a.ppm"), rgb);
  const GrayRaster gray = gen.gray(4, 6);
  write_pgm(dir_ / "a.pgm", gray);
  EXPECT_EQ(read_gray(dir_ / "a.pgm"), gray);
}

TEST_F(ImageIo, MaskPgmHoldsOnlyBinaryValues) {
  testing::Gen gen(4);
  const BinaryMask m = gen.mask(7, 7, 0.5);
  write_pgm(dir_ / "m.pgm", m);
  EXPECT_EQ(BinaryMask::from_gray(read_gray(dir_ / "m.pgm")), m);
}

TEST_F(ImageIo, PgmHeaderIsCanonical) {
  write_pgm(dir_ / "h.pgm", GrayRaster(3, 2, 7));
  std::ifstream in(dir_ / "h.pgm", std::ios::binary);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(text.substr(0, 11), "P5\n3 2\n255\n");
  EXPECT_EQ(text.size(), 11u + 6u);
}

TEST_F(ImageIo, RejectsGarbage) {
  std::ofstream(dir_ / "bad.png") << "definitely not an image";
  EXPECT_THROW(read_rgb(dir_ / "bad.png"), ImageIoError);
  EXPECT_THROW(read_rgb(dir_ / "missing.png"), ImageIoError);
  std::ofstream(dir_ / "short.ppm", std::ios::binary) << "P6\n4 4\n255\nabc";
  EXPECT_THROW(read_rgb(dir_ / "short.ppm"), ImageIoError);
}

TEST(ImageExtension, Recognized) {
  EXPECT_TRUE(has_image_extension("x.png"));
  EXPECT_TRUE(has_image_extension("x.PNG"));
  EXPECT_TRUE(has_image_extension("a/b.ppm"));
  EXPECT_TRUE(has_image_extension("b.pgm"));
  EXPECT_FALSE(has_image_extension("labels.csv"));
  EXPECT_FALSE(has_image_extension("noext"));
}

}  // namespace
}  // namespace fundus
