#include <benchmark/benchmark.h>

#include <random>

#include "decaycoh/coherence_estimator.hpp"
#include "decaycoh/rir_sim.hpp"

using namespace decaycoh;

namespace {

SimConfig reference_sim(bool fractional) {
  SimConfig cfg;
  cfg.room = {6.0, 4.0, 3.0, 0.8, 1.0, 1.0, 343.0};
  cfg.source = {4.8, 3.2, 2.6};
  for (int i = 0; i < 16; ++i) cfg.mics.push_back({3.0 + (i - 7.5) * 0.08, 2.0, 1.5});
  cfg.length = 6400;
  cfg.fractional_delay = fractional;
  return cfg;
}

}  // namespace

static void BM_EnumerateImages(benchmark::State& state) {
  const auto cfg = reference_sim(false);
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_images(cfg));
}
BENCHMARK(BM_EnumerateImages)->Unit(benchmark::kMillisecond);

static void BM_SynthesizeRir(benchmark::State& state) {
  const auto cfg = reference_sim(state.range(0) != 0);
  for (auto _ : state) benchmark::DoNotOptimize(synthesize_rir(cfg));
}
BENCHMARK(BM_SynthesizeRir)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_EstimateAll(benchmark::State& state) {
  ImpulseResponseSet ir;
  ir.sample_rate = 16000.0;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  ir.channels.assign(16, std::vector<double>(6400));
  for (auto& ch : ir.channels) {
    for (auto& v : ch) v = n(rng);
  }
  const EstimationConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_all(ir, cfg));
}
BENCHMARK(BM_EstimateAll)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
