#include <benchmark/benchmark.h>

#include "fundus/classifiers.hpp"
#include "fundus/rng.hpp"

namespace {

using namespace fundus;

struct Data {
  FeatureMatrix x{99};
  std::vector<Grade> y;
};

Data blobs(std::size_t rows) {
  Pcg32 rng(3, 0);
  Data d;
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t c = i % kGradeCount;
    std::vector<double> row(99);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = rng.uniform() + (j % kGradeCount == c ? 1.0 : 0.0);
    d.x.push_row(row);
    d.y.push_back(static_cast<Grade>(c));
  }
  return d;
}

void BM_RandomForestTrain(benchmark::State& state) {
  const Data d = blobs(1000);
  RandomForestParams p;
  p.n_trees = 20;
  p.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(rf_train(d.x, d.y, p));
}
BENCHMARK(BM_RandomForestTrain)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_SvmCascadeTrain(benchmark::State& state) {
  const Data d = blobs(1000);
  SvmParams p;
  p.epochs = 50;
  for (auto _ : state) benchmark::DoNotOptimize(svm_cascade_train(d.x, d.y, p));
}
BENCHMARK(BM_SvmCascadeTrain)->Unit(benchmark::kMillisecond);

void BM_NaiveBayesTrain(benchmark::State& state) {
  const Data d = blobs(1000);
  for (auto _ : state) benchmark::DoNotOptimize(nb_train(d.x, d.y));
}
BENCHMARK(BM_NaiveBayesTrain);

}  // namespace
