#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tenas/metrics/score.hpp"
#include "tenas/space/space_config.hpp"

namespace tenas::search {

/// Rank of each κ ascending plus rank of each R̂ descending (0-based
/// positions, ties broken by index). Lower is better.
std::vector<double> combined_rank(std::span<const double> kappas, std::span<const double> r_hats);

/// `count` distinct single-path ArchIds drawn uniformly, in sampling order.
/// When `count` reaches the space size every architecture is returned in
/// lexicographic order.
std::vector<std::string> sample_architectures(const space::SpaceConfig& space, std::size_t count,
                                              std::uint64_t seed);

struct ScoredArch {
  std::string arch_id;
  double kappa_mean = 0.0;
  double r_hat = 0.0;
  double combined = 0.0;
};

struct RandomSearchResult {
  std::string best;
  std::vector<ScoredArch> samples;  // in sampling order
  std::vector<std::string> warnings;
};

/// Samples `budget` distinct single-path architectures uniformly (all of
/// them if the budget covers the space), scores each under its own ArchId
/// seed scope and returns the combined-rank minimizer.
RandomSearchResult random_search_baseline(std::shared_ptr<const space::SpaceConfig> space,
                                          std::size_t budget, std::uint64_t seed,
                                          const metrics::MeasureConfig& measure);

}  // namespace tenas::search
