#include <benchmark/benchmark.h>
#include <omp.h>

#include <map>
#include <random>

#include "flipal/acquisition.hpp"

namespace {

using namespace flipal;

ClassDist random_dist(std::mt19937_64& g, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(n);
  for (auto& v : w) v = u(g) + 1e-3;
  w[g() % n] += 3.0;
  return ClassDist::normalized(std::move(w));
}

ImagePrediction random_prediction(std::mt19937_64& g, const ImageId& id, std::size_t n_dets) {
  constexpr double kSide = 500.0;
  std::uniform_real_distribution<double> pos(0.0, kSide - 60.0), size(20.0, 60.0);
  ImagePrediction p{id, 500, 500, {}};
  for (std::size_t k = 0; k < n_dets; ++k) {
    const double x = pos(g), y = pos(g);
    p.detections.push_back(
        Detection::from_corner({x, y, x + size(g), y + size(g)}, random_dist(g, 21), kSide, kSide));
  }
  return p;
}

/// Unlabeled pool stand-in: each image has an original and a flipped
/// prediction with 20-60 detections over 21 categories.
const std::vector<PredictionPair>& pool_of(std::size_t n) {
  static std::map<std::size_t, std::vector<PredictionPair>> cache;
  auto& v = cache[n];
  if (v.empty()) {
    std::mt19937_64 g(42);
    for (std::size_t i = 0; i < n; ++i) {
      const auto id = "img" + std::to_string(i);
      const std::size_t d = 20 + g() % 41;
      auto orig = random_prediction(g, id, d);
      auto flipped = hflip(orig);
      for (auto& det : flipped.detections) {
        if (g() % 3 == 0) det.dist = random_dist(g, 21);
      }
      v.push_back({std::move(orig), std::move(flipped)});
    }
  }
  return v;
}

void BM_ScoreSerial(benchmark::State& state) {
  const auto& images = pool_of(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(score_images_serial(images));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ScoreParallel(benchmark::State& state) {
  const auto& images = pool_of(static_cast<std::size_t>(state.range(0)));
  const int saved = omp_get_max_threads();
  omp_set_num_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(score_images(images));
  omp_set_num_threads(saved);
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = static_cast<double>(state.range(1));
}

void thread_sweep(benchmark::internal::Benchmark* b) {
  const int max_threads = omp_get_max_threads();
  for (int n : {500, 4000}) {
    for (int t = 1; t <= max_threads; t *= 2) b->Args({n, t});
    if ((max_threads & (max_threads - 1)) != 0) b->Args({n, max_threads});
  }
}

}  // namespace

BENCHMARK(BM_ScoreSerial)->Arg(500)->Arg(4000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ScoreParallel)->Apply(thread_sweep)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
