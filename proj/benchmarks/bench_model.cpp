#include <benchmark/benchmark.h>

#include "decaycoh/decay_model.hpp"
#include "decaycoh/isotropic.hpp"

using namespace decaycoh;

namespace {
const RoomSpec kRoom{6.0, 4.0, 3.0, 0.8, 1.0, 1.0, 343.0};
const MicPairSpec kMic{0.08, 0.35, 0.63};
}  // namespace

static void BM_BesselJ0(benchmark::State& state) {
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bessel_j0(x));
    x = x > 40.0 ? 0.0 : x + 0.37;
  }
}
BENCHMARK(BM_BesselJ0);

// k in rad/m; the cost grows with k d because the phase oscillates faster.
static void BM_DecayingCoherence(benchmark::State& state) {
  const double k = static_cast<double>(state.range(0));
  std::size_t panels = 0;
  for (auto _ : state) {
    const auto r = integrate_coherence(k, 0.21, kRoom, kMic);
    panels = r.panels;
    benchmark::DoNotOptimize(r.value);
  }
  state.counters["panels"] = static_cast<double>(panels);
}
BENCHMARK(BM_DecayingCoherence)->Arg(10)->Arg(100)->Arg(370)->Unit(benchmark::kMillisecond);

static void BM_PeakedWeight(benchmark::State& state) {
  const RoomSpec dead{6.0, 4.0, 3.0, 1e-4, 1e-3, 0.5, 343.0};
  for (auto _ : state) benchmark::DoNotOptimize(decaying_coherence(100.0, 0.5, dead, kMic));
}
BENCHMARK(BM_PeakedWeight)->Unit(benchmark::kMillisecond);

static void BM_MonteCarlo(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(mc_coherence(100.0, 0.21, kRoom, kMic, 1 << 20, 7));
  }
  state.SetItemsProcessed(state.iterations() * (1 << 20));
}
BENCHMARK(BM_MonteCarlo)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
