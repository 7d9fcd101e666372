#include "tenas/metrics/score.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "tenas/metrics/eigen.hpp"

namespace tenas::metrics {

namespace {

nn::Tensor draw_inputs(const nn::Shape& input_shape, const MeasureConfig& config,
                       std::size_t count, std::uint64_t seed) {
  if (!config.data) return nn::Tensor::standard_normal(nn::batched(count, input_shape), seed);
  const nn::Tensor& pool = *config.data;
  if (pool.sample_shape() != input_shape) {
    throw ConfigError("data file samples have shape " + nn::shape_string(pool.sample_shape()) +
                      ", the network expects " + nn::shape_string(input_shape));
  }
  const std::size_t available = pool.batch();
  count = std::min(count, available);
  std::vector<std::size_t> order(available);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  nn::Tensor out(nn::batched(count, input_shape));
  for (std::size_t i = 0; i < count; ++i) {
    const auto src = pool.sample(order[i]);
    std::copy(src.begin(), src.end(), out.sample(i).begin());
  }
  return out;
}

}  // namespace

nn::Tensor ntk_batch(const nn::Shape& input_shape, const MeasureConfig& config,
                     const SeedSchedule& seeds, std::size_t repeat) {
  if (config.data && config.data->batch() < config.batch_size) {
    throw ConfigError("data file has " + std::to_string(config.data->batch()) +
                      " samples, fewer than the NTK batch size " + std::to_string(config.batch_size));
  }
  return draw_inputs(input_shape, config, config.batch_size, seeds.input_seed(kNtkMetric, repeat));
}

nn::Tensor region_inputs(const nn::Shape& input_shape, const MeasureConfig& config,
                         const SeedSchedule& seeds) {
  return draw_inputs(input_shape, config, config.region_samples, seeds.input_seed(kRegionMetric, 0));
}

NtkReport kappa(std::shared_ptr<const nn::Graph> graph, const MeasureConfig& config,
                const SeedSchedule& seeds) {
  if (config.batch_size < 2) throw InvalidArgument("NTK batch size must be at least 2");
  if (config.repeats < 1) throw InvalidArgument("repeats must be at least 1");
  NtkReport report;
  report.eigenvalues.resize(config.repeats);
  report.per_repeat.resize(config.repeats);
  parallel_for(config.repeats, config.jobs, [&](std::size_t r) {
    nn::Network net(graph);
    net.initialize(seeds.param_seed(kNtkMetric, r));
    const nn::Tensor batch = ntk_batch(graph->input_shape(), config, seeds, r);
    report.eigenvalues[r] = symmetric_eigenvalues(compute_ntk(net, batch, config.jacobian_mode));
    report.per_repeat[r] = condition_number(report.eigenvalues[r]);
  });
  report.kappa_mean = mean_kappa(report.per_repeat);
  return report;
}

RegionReport count_regions(std::shared_ptr<const nn::Graph> graph, const MeasureConfig& config,
                           const SeedSchedule& seeds) {
  if (config.region_samples < 1) throw InvalidArgument("region sample count must be at least 1");
  if (config.repeats < 1) throw InvalidArgument("repeats must be at least 1");
  const nn::Tensor inputs = region_inputs(graph->input_shape(), config, seeds);
  RegionReport report;
  report.counts.resize(config.repeats);
  report.samples_used = inputs.batch();
  report.relu_units = graph->relu_unit_count();
  report.affine_only = report.relu_units == 0;
  parallel_for(config.repeats, config.jobs, [&](std::size_t r) {
    nn::Network net(graph);
    net.initialize(seeds.param_seed(kRegionMetric, r));
    report.counts[r] = count_distinct_patterns(net, inputs);
  });
  double sum = 0.0;
  for (auto c : report.counts) sum += static_cast<double>(c);
  report.r_hat = sum / static_cast<double>(report.counts.size());
  return report;
}

Score score(std::shared_ptr<const nn::Graph> graph, const MeasureConfig& config,
            const SeedSchedule& seeds) {
  Score s;
  s.ntk = kappa(graph, config, seeds);
  s.regions = count_regions(std::move(graph), config, seeds);
  return s;
}

Score score(std::shared_ptr<const nn::Graph> graph, std::string_view arch_id,
            const MeasureConfig& config) {
  return score(std::move(graph), config, SeedSchedule{config.base_seed, std::string(arch_id)});
}

}  // namespace tenas::metrics
