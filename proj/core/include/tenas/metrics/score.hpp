#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "tenas/common.hpp"
#include "tenas/metrics/ntk.hpp"
#include "tenas/metrics/regions.hpp"
#include "tenas/nn/network.hpp"

namespace tenas::metrics {

struct MeasureConfig {
  std::size_t batch_size = 32;
  std::size_t region_samples = 3000;
  std::size_t repeats = 3;
  std::uint64_t base_seed = 0;
  nn::JacobianMode jacobian_mode = nn::JacobianMode::SumLogits;
  /// Optional input pool [M, input dims]; standard-normal inputs otherwise.
  std::shared_ptr<const nn::Tensor> data;
  std::size_t jobs = 1;
};

/// Derives the parameter and input seeds of one measurement.
///
/// Parameter seeds mix in `scope`: the ArchId when scoring architectures
/// independently, a fixed tag when a search wants every candidate of a
/// supernet to share initializations. Input seeds ignore the scope, so all
/// architectures under one base seed see the same inputs.
struct SeedSchedule {
  std::uint64_t base_seed = 0;
  std::string scope;

  [[nodiscard]] std::uint64_t param_seed(std::string_view metric, std::size_t repeat) const {
    return stable_hash(base_seed, scope, metric, repeat);
  }
  [[nodiscard]] std::uint64_t input_seed(std::string_view metric, std::size_t repeat) const {
    return stable_hash(base_seed, std::string_view("inputs"), metric, repeat);
  }
};

inline constexpr std::string_view kNtkMetric = "ntk";
inline constexpr std::string_view kRegionMetric = "regions";

/// Input batch of the NTK measurement for one repeat (fresh per repeat).
nn::Tensor ntk_batch(const nn::Shape& input_shape, const MeasureConfig& config,
                     const SeedSchedule& seeds, std::size_t repeat);

/// Inputs of the region measurement. One fixed sample set is reused for
/// every repeat; only the parameters are redrawn.
nn::Tensor region_inputs(const nn::Shape& input_shape, const MeasureConfig& config,
                         const SeedSchedule& seeds);

/// Condition number of the NTK, averaged over `repeats` Kaiming draws.
NtkReport kappa(std::shared_ptr<const nn::Graph> graph, const MeasureConfig& config,
                const SeedSchedule& seeds);

/// Distinct activation patterns over the region inputs, averaged over
/// `repeats` Kaiming draws.
RegionReport count_regions(std::shared_ptr<const nn::Graph> graph, const MeasureConfig& config,
                           const SeedSchedule& seeds);

struct Score {
  NtkReport ntk;
  RegionReport regions;
};

Score score(std::shared_ptr<const nn::Graph> graph, const MeasureConfig& config,
            const SeedSchedule& seeds);

/// Scores an architecture on its own, with parameter seeds derived from
/// (base_seed, arch_id, metric, repeat).
Score score(std::shared_ptr<const nn::Graph> graph, std::string_view arch_id,
            const MeasureConfig& config);

}  // namespace tenas::metrics
