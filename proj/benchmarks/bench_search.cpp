#include <benchmark/benchmark.h>

#include "tenas/search/pruning.hpp"
#include "tenas/space/supernet.hpp"

namespace {

using namespace tenas;

void BM_PruneRound(benchmark::State& state, const char* preset, std::size_t region_samples) {
  auto space = std::make_shared<const space::SpaceConfig>(space::preset(preset));
  search::SearchConfig config;
  config.measure.region_samples = region_samples;
  config.measure.repeats = 1;
  config.measure.batch_size = 8;
  const auto net = space::build_supernet(space);
  for (auto _ : state) {
    search::Evaluator evaluator(config);
    const auto baseline = evaluator.measure(net);
    benchmark::DoNotOptimize(search::prune_round(net, baseline, evaluator, 1));
  }
}
BENCHMARK_CAPTURE(BM_PruneRound, toy_mlp, "toy-mlp", 3000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_PruneRound, nasbench201_like, "nasbench201-like", 200)
    ->Unit(benchmark::kSecond)
    ->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
