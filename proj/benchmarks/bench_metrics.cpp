#include <benchmark/benchmark.h>

#include <random>

#include "tenas/metrics/eigen.hpp"
#include "tenas/metrics/ntk.hpp"
#include "tenas/metrics/regions.hpp"
#include "tenas/space/supernet.hpp"

namespace {

using namespace tenas;

std::shared_ptr<const nn::Graph> supernet_graph(const char* preset) {
  auto config = std::make_shared<const space::SpaceConfig>(space::preset(preset));
  return space::realize(space::build_supernet(config));
}

void BM_Jacobian(benchmark::State& state, const char* preset) {
  const auto graph = supernet_graph(preset);
  nn::Network net(graph);
  net.initialize(1);
  const auto x = nn::Tensor::standard_normal(nn::batched(static_cast<std::size_t>(state.range(0)), graph->input_shape()), 2);
  for (auto _ : state) benchmark::DoNotOptimize(net.per_sample_jacobian(x));
  state.counters["params"] = static_cast<double>(graph->param_count());
}
BENCHMARK_CAPTURE(BM_Jacobian, toy_mlp, "toy-mlp")->Arg(32);
BENCHMARK_CAPTURE(BM_Jacobian, nasbench201_like, "nasbench201-like")->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_SymmetricEigen(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  Matrix a(n, n);
  for (auto& v : a.data()) v = g(rng);
  const Matrix gram = a.gram();
  for (auto _ : state) benchmark::DoNotOptimize(metrics::symmetric_eigenvalues(gram));
}
BENCHMARK(BM_SymmetricEigen)->Arg(8)->Arg(32)->Arg(64);

void BM_CountPatterns(benchmark::State& state, const char* preset) {
  const auto graph = supernet_graph(preset);
  nn::Network net(graph);
  net.initialize(4);
  const auto x = nn::Tensor::standard_normal(nn::batched(static_cast<std::size_t>(state.range(0)), graph->input_shape()), 5);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::count_distinct_patterns(net, x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK_CAPTURE(BM_CountPatterns, toy_mlp, "toy-mlp")->Arg(3000);
BENCHMARK_CAPTURE(BM_CountPatterns, nasbench201_like, "nasbench201-like")->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace
