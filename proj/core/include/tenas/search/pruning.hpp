#pragma once

#include <atomic>
#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "tenas/metrics/score.hpp"
#include "tenas/search/importance.hpp"
#include "tenas/space/supernet.hpp"

namespace tenas::search {

struct SearchConfig {
  Strategy strategy = Strategy::SumRank;
  metrics::MeasureConfig measure;
  /// Parameter-seed scope shared by every supernet measured in one run.
  std::string seed_scope = "search";
};

struct Measurement {
  double kappa_mean = 0.0;  // +inf when divergent
  double r_hat = 0.0;
};

/// Measures supernets under the search seed schedule and counts how many
/// measurements were taken. Thread-safe.
class Evaluator {
 public:
  explicit Evaluator(SearchConfig config);

  /// `jobs` = 0 uses measure.jobs.
  Measurement measure(const space::SuperNet& net, std::size_t jobs = 0);
  [[nodiscard]] std::size_t evaluations() const noexcept { return count_.load(); }
  [[nodiscard]] const SearchConfig& config() const noexcept { return config_; }

 private:
  SearchConfig config_;
  std::atomic<std::size_t> count_{0};
};

struct Delta {
  double delta_kappa = 0.0;
  double delta_r = 0.0;
};

/// Δκ = κ(N_t) − κ(N_t \ o), ΔR = R̂(N_t) − R̂(N_t \ o), where `baseline`
/// holds the metrics of N_t. `position` indexes net.candidates(edge).
Delta delta_metrics(const space::SuperNet& net, std::size_t edge, std::size_t position,
                    const Measurement& baseline, Evaluator& evaluator, std::size_t jobs = 0);

struct PrunedOp {
  std::size_t edge = 0;
  std::string op;
};

struct TrajectoryRecord {
  std::size_t round = 0;
  std::string supernet;
  double kappa_mean = 0.0;
  double r_hat = 0.0;
  std::vector<PrunedOp> pruned;
  double wall_time = 0.0;       // seconds spent on this round
  std::size_t evaluations = 0;  // measurements taken in this round
  std::size_t slots = 0;        // surviving operators after the round
};

struct RoundResult {
  space::SuperNet net;
  TrajectoryRecord record;
  ImportanceTable table;
  Measurement measurement;  // metrics of `net`, the next round's baseline
};

/// One pruning round: measures every prunable candidate against `baseline`
/// (the metrics of `net`), ranks them globally and removes the lowest-s
/// operator from each edge above its floor. Candidate measurements run on
/// up to measure.jobs threads.
RoundResult prune_round(const space::SuperNet& net, const Measurement& baseline,
                        Evaluator& evaluator, std::size_t round);

/// Convenience form that measures `net` first.
std::pair<space::SuperNet, TrajectoryRecord> prune_round(const space::SuperNet& net,
                                                         const SearchConfig& config);

struct SearchResult {
  std::string arch_id;
  std::vector<TrajectoryRecord> trajectory;  // record 0 is the unpruned supernet
  std::vector<ImportanceTable> tables;       // one per round
  std::size_t evaluations = 0;
};

SearchResult run_search(std::shared_ptr<const space::SpaceConfig> space, const SearchConfig& config);

}  // namespace tenas::search
