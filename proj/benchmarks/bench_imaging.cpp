#include <benchmark/benchmark.h>

#include "fundus/enhance.hpp"
#include "fundus/lesions.hpp"
#include "fundus/morphology.hpp"
#include "fundus/rng.hpp"

namespace {

using namespace fundus;

GrayRaster noise_image(int size) {
  Pcg32 rng(1, 0);
  GrayRaster img(size, size);
  for (auto& p : img.pixels()) p = static_cast<std::uint8_t>(rng.bounded(256));
  return img;
}

void BM_Clahe(benchmark::State& state) {
  const GrayRaster img = noise_image(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(clahe(img));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(img.size()));
}
BENCHMARK(BM_Clahe)->Arg(128)->Arg(350);

void BM_Median(benchmark::State& state) {
  const GrayRaster img = noise_image(350);
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(median_filter(img, k));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(img.size()));
}
BENCHMARK(BM_Median)->Arg(3)->Arg(5)->Arg(9);

void BM_Dilate(benchmark::State& state) {
  const GrayRaster img = noise_image(350);
  const int s = static_cast<int>(state.range(0));
  const StructuringElement se = ellipse_se(s, s);
  for (auto _ : state) benchmark::DoNotOptimize(dilate(img, se));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(img.size()));
}
BENCHMARK(BM_Dilate)->Arg(3)->Arg(7)->Arg(23);

void BM_DetectAll(benchmark::State& state) {
  Pcg32 rng(2, 0);
  RgbRaster img(350, 350);
  for (auto& p : img.data()) p = static_cast<std::uint8_t>(60 + rng.bounded(40));
  const LesionParams params;
  for (auto _ : state) benchmark::DoNotOptimize(detect_all(img, params));
}
BENCHMARK(BM_DetectAll)->Unit(benchmark::kMillisecond);

}  // namespace
