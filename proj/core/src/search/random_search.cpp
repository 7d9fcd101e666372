#include "tenas/search/random_search.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <unordered_set>

#include "tenas/common.hpp"
#include "tenas/space/supernet.hpp"

namespace tenas::search {

namespace {

std::vector<std::size_t> positions(std::span<const double> values, bool descending) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return descending ? values[a] > values[b] : values[a] < values[b];
  });
  std::vector<std::size_t> rank(values.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) rank[order[pos]] = pos;
  return rank;
}

std::string sample_architecture(const space::SpaceConfig& config, std::mt19937_64& rng) {
  std::string id;
  std::vector<std::size_t> ops(config.op_count());
  std::vector<std::size_t> chosen;
  for (std::size_t e = 0; e < config.edge_count(); ++e) {
    std::iota(ops.begin(), ops.end(), std::size_t{0});
    // Partial Fisher-Yates: the first k entries form a uniform k-subset.
    for (std::size_t i = 0; i < config.target_ops_per_edge; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, ops.size() - 1);
      std::swap(ops[i], ops[pick(rng)]);
    }
    chosen.assign(ops.begin(), ops.begin() + static_cast<std::ptrdiff_t>(config.target_ops_per_edge));
    std::sort(chosen.begin(), chosen.end());
    id += (e == 0 ? "e" : "|e") + std::to_string(e) + ":";
    for (std::size_t i = 0; i < chosen.size(); ++i) {
      id += (i == 0 ? "" : "+") + config.operators[chosen[i]].name;
    }
  }
  return id;
}

}  // namespace

std::vector<std::string> sample_architectures(const space::SpaceConfig& space, std::size_t count,
                                              std::uint64_t seed) {
  const std::size_t total = space::architecture_count(space);
  if (count >= total) return space::enumerate_architectures(space, total);
  std::mt19937_64 rng(stable_hash(seed, std::string_view("random-search")));
  std::unordered_set<std::string> seen;
  std::vector<std::string> archs;
  while (archs.size() < count) {
    auto id = sample_architecture(space, rng);
    if (seen.insert(id).second) archs.push_back(std::move(id));
  }
  return archs;
}

std::vector<double> combined_rank(std::span<const double> kappas, std::span<const double> r_hats) {
  if (kappas.size() != r_hats.size()) throw InvalidArgument("combined_rank: length mismatch");
  const auto rk = positions(kappas, false);
  const auto rr = positions(r_hats, true);
  std::vector<double> out(kappas.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<double>(rk[i] + rr[i]);
  return out;
}

RandomSearchResult random_search_baseline(std::shared_ptr<const space::SpaceConfig> space,
                                          std::size_t budget, std::uint64_t seed,
                                          const metrics::MeasureConfig& measure) {
  if (budget < 1) throw InvalidArgument("random search budget must be at least 1");
  RandomSearchResult result;
  const std::size_t total = space::architecture_count(*space);

  if (budget > total) {
    result.warnings.push_back("budget " + std::to_string(budget) + " exceeds the space size " +
                              std::to_string(total) + "; clipped");
  }
  const auto archs = sample_architectures(*space, budget, seed);

  std::vector<double> kappas(archs.size()), r_hats(archs.size());
  for (std::size_t i = 0; i < archs.size(); ++i) {
    const auto net = space::decode(archs[i], space);
    const auto s = metrics::score(space::realize(net), archs[i], measure);
    kappas[i] = s.ntk.kappa_mean;
    r_hats[i] = s.regions.r_hat;
  }
  const auto combined = combined_rank(kappas, r_hats);
  std::size_t best = 0;
  for (std::size_t i = 0; i < archs.size(); ++i) {
    result.samples.push_back({archs[i], kappas[i], r_hats[i], combined[i]});
    if (combined[i] < combined[best]) best = i;
  }
  result.best = archs[best];
  return result;
}

}  // namespace tenas::search
