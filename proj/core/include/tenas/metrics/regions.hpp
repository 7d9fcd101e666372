#pragma once

#include <cstddef>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "tenas/nn/network.hpp"

namespace tenas::metrics {

/// Set of distinct activation signatures. Buckets by 64-bit hash and
/// compares full signatures inside a bucket, so collisions never merge
/// distinct patterns.
class PatternSet {
 public:
  /// Returns true if the signature was not seen before.
  bool insert(const nn::ActivationSignature& sig);
  [[nodiscard]] std::size_t size() const noexcept { return size_; }

 private:
  std::unordered_map<std::uint64_t, std::vector<nn::ActivationSignature>> buckets_;
  std::size_t size_ = 0;
};

/// Number of distinct activation patterns over `inputs` ([M, input dims]).
/// Forwards in chunks to bound memory.
std::size_t count_distinct_patterns(const nn::Network& net, const nn::Tensor& inputs,
                                    std::size_t chunk = 256);

struct RegionReport {
  std::vector<std::size_t> counts;  // distinct patterns per repeat
  double r_hat = 0.0;               // mean of counts
  std::size_t samples_used = 0;
  std::size_t relu_units = 0;
  bool affine_only = false;  // no ReLU units: the whole input space is one region
};

}  // namespace tenas::metrics
