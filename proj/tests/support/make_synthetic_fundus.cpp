// Regenerates the bundled synthetic fundus images, labels and truth manifest.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "fundus/image_io.hpp"
#include "synthetic_fundus.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_synthetic_fundus <output_dir>\n";
    return 2;
  }
  const std::filesystem::path dir = argv[1];
  std::filesystem::create_directories(dir);
  for (const auto& c : fundus::testing::synthetic_fundus_cases()) {
    fundus::write_png(dir / (c.id + ".png"), fundus::testing::render_scene(c.scene, c.seed));
  }
  std::ofstream(dir / "labels.csv", std::ios::binary) << fundus::testing::synthetic_labels_csv();
  std::ofstream(dir / "truth.json", std::ios::binary) << fundus::testing::synthetic_truth_json();
  return 0;
}
