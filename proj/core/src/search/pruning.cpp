#include "tenas/search/pruning.hpp"

#include <chrono>
#include <cmath>

#include "tenas/common.hpp"

namespace tenas::search {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

Evaluator::Evaluator(SearchConfig config) : config_(std::move(config)) {}

Measurement Evaluator::measure(const space::SuperNet& net, std::size_t jobs) {
  const metrics::SeedSchedule seeds{config_.measure.base_seed, config_.seed_scope};
  auto measure = config_.measure;
  if (jobs != 0) measure.jobs = jobs;
  const auto result = metrics::score(space::realize(net), measure, seeds);
  ++count_;
  return {result.ntk.kappa_mean, result.regions.r_hat};
}

Delta delta_metrics(const space::SuperNet& net, std::size_t edge, std::size_t position,
                    const Measurement& baseline, Evaluator& evaluator, std::size_t jobs) {
  const auto without = evaluator.measure(net.prune_operator(edge, position), jobs);
  return {kappa_difference(baseline.kappa_mean, without.kappa_mean),
          baseline.r_hat - without.r_hat};
}

RoundResult prune_round(const space::SuperNet& net, const Measurement& baseline,
                        Evaluator& evaluator, std::size_t round) {
  if (net.is_single_path()) throw InvalidArgument("prune_round on a single-path network");
  const auto start = Clock::now();
  const std::size_t before = evaluator.evaluations();

  struct Candidate {
    std::size_t edge, position;
  };
  std::vector<Candidate> candidates;
  for (std::size_t e = 0; e < net.edge_count(); ++e) {
    if (!net.edge_prunable(e)) continue;
    for (std::size_t p = 0; p < net.candidates(e).size(); ++p) candidates.push_back({e, p});
  }
  if (candidates.empty()) throw InvariantError("no prunable edge in a multi-path network");

  // Threads are spent across candidates, so each candidate measures serially.
  const std::size_t jobs = evaluator.config().measure.jobs;
  std::vector<DeltaRow> deltas(candidates.size());
  parallel_for(candidates.size(), jobs, [&](std::size_t i) {
    const auto [e, p] = candidates[i];
    const auto d = delta_metrics(net, e, p, baseline, evaluator, 1);
    deltas[i] = {e, net.candidates(e)[p], d.delta_kappa, d.delta_r};
  });

  RoundResult result{net, {}, build_importance(std::move(deltas), evaluator.config().strategy), {}};
  const auto& ops = net.space().operators;
  for (const auto& [edge, row_index] : result.table.argmin_per_edge()) {
    const std::size_t op = result.table.rows[row_index].op;
    const auto& list = result.net.candidates(edge);
    std::size_t position = 0;
    while (list[position] != op) ++position;
    result.net = result.net.prune_operator(edge, position);
    result.record.pruned.push_back({edge, ops[op].name});
  }

  result.measurement = evaluator.measure(result.net);
  result.record.round = round;
  result.record.supernet = result.net.encode();
  result.record.kappa_mean = result.measurement.kappa_mean;
  result.record.r_hat = result.measurement.r_hat;
  result.record.slots = result.net.slot_count();
  result.record.evaluations = evaluator.evaluations() - before;
  result.record.wall_time = seconds_since(start);
  return result;
}

std::pair<space::SuperNet, TrajectoryRecord> prune_round(const space::SuperNet& net,
                                                         const SearchConfig& config) {
  Evaluator evaluator(config);
  const auto baseline = evaluator.measure(net);
  auto result = prune_round(net, baseline, evaluator, 1);
  return {std::move(result.net), std::move(result.record)};
}

SearchResult run_search(std::shared_ptr<const space::SpaceConfig> space, const SearchConfig& config) {
  const auto start = Clock::now();
  Evaluator evaluator(config);
  auto net = space::build_supernet(std::move(space));

  SearchResult result;
  auto measurement = evaluator.measure(net);
  TrajectoryRecord first;
  first.round = 0;
  first.supernet = net.encode();
  first.kappa_mean = measurement.kappa_mean;
  first.r_hat = measurement.r_hat;
  first.slots = net.slot_count();
  first.evaluations = 1;
  first.wall_time = seconds_since(start);
  result.trajectory.push_back(std::move(first));

  for (std::size_t round = 1; !net.is_single_path(); ++round) {
    auto step = prune_round(net, measurement, evaluator, round);
    net = std::move(step.net);
    measurement = step.measurement;
    result.trajectory.push_back(std::move(step.record));
    result.tables.push_back(std::move(step.table));
  }
  result.arch_id = net.encode();
  result.evaluations = evaluator.evaluations();
  return result;
}

}  // namespace tenas::search
