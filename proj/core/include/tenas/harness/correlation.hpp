#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tenas/harness/benchmark_table.hpp"
#include "tenas/harness/datasets.hpp"
#include "tenas/harness/trainer.hpp"
#include "tenas/metrics/score.hpp"
#include "tenas/space/space_config.hpp"

namespace tenas::harness {

struct CorrelationRow {
  std::string arch_id;
  double kappa = 0.0;  // +inf when divergent
  double r_hat = 0.0;
  double combined_rank = 0.0;
  double accuracy = 0.0;
  std::optional<double> train_accuracy;
  bool diverged = false;
};

struct CorrelationReport {
  double tau_kappa = 0.0;
  double tau_r = 0.0;
  double tau_combined = 0.0;
  std::size_t n = 0;
  std::vector<CorrelationRow> rows;
  /// Kendall tau between train and test accuracy, when train accuracies exist.
  std::optional<double> tau_train_test;
};

struct StudyConfig {
  metrics::MeasureConfig measure;
  TrainConfig train;
  /// Architectures to study; 0 enumerates the whole space.
  std::size_t architectures = 0;
  std::uint64_t sample_seed = 0;
  std::size_t jobs = 1;
};

/// The studied architectures: every one when `count` is 0 or covers the
/// space, otherwise `count` distinct uniform samples in sorted order.
std::vector<std::string> select_architectures(const space::SpaceConfig& space, std::size_t count,
                                              std::uint64_t seed);

/// Scores each architecture, trains it with the oracle trainer and reports
/// Kendall tau of accuracy against κ, R̂ and their combined rank (lower
/// rank is the better proxy score). Needs at least 10 architectures.
CorrelationReport correlation_study(std::shared_ptr<const space::SpaceConfig> space,
                                    const std::vector<std::string>& archs, const Dataset& data,
                                    const StudyConfig& config);

/// Same study with accuracies taken from a benchmark table instead of
/// training. Every table row is scored.
CorrelationReport correlation_study(std::shared_ptr<const space::SpaceConfig> space,
                                    const BenchmarkTable& table, const StudyConfig& config);

std::string to_json(const CorrelationReport& report);
/// Header arch_id,kappa,r_hat,combined_rank,accuracy.
void write_correlation_csv(std::ostream& out, const CorrelationReport& report);

}  // namespace tenas::harness
