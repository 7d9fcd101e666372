#include "tenas/metrics/regions.hpp"

#include <algorithm>

namespace tenas::metrics {

bool PatternSet::insert(const nn::ActivationSignature& sig) {
  auto& bucket = buckets_[sig.hash()];
  if (std::find(bucket.begin(), bucket.end(), sig) != bucket.end()) return false;
  bucket.push_back(sig);
  ++size_;
  return true;
}

std::size_t count_distinct_patterns(const nn::Network& net, const nn::Tensor& inputs,
                                    std::size_t chunk) {
  PatternSet seen;
  const std::size_t total = inputs.batch();
  chunk = std::max<std::size_t>(chunk, 1);
  for (std::size_t begin = 0; begin < total; begin += chunk) {
    const std::size_t end = std::min(total, begin + chunk);
    const nn::Tensor part = begin == 0 && end == total ? inputs : inputs.slice(begin, end);
    for (const auto& sig : net.signatures(part)) seen.insert(sig);
  }
  return seen.size();
}

}  // namespace tenas::metrics
