#include "tenas/space/supernet.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>

#include "tenas/common.hpp"

namespace tenas::space {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::size_t choose(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    if (r > std::numeric_limits<std::size_t>::max() / (n - k + i)) return std::numeric_limits<std::size_t>::max();
    r = r * (n - k + i) / i;
  }
  return r;
}

}  // namespace

SuperNet::SuperNet(std::shared_ptr<const SpaceConfig> space,
                   std::vector<std::vector<std::size_t>> candidates)
    : space_(std::move(space)), candidates_(std::move(candidates)) {
  if (!space_) throw InvariantError("supernet without a space");
  if (candidates_.size() != space_->edge_count()) {
    throw ConfigError("supernet has " + std::to_string(candidates_.size()) + " edges, space has " +
                      std::to_string(space_->edge_count()));
  }
  for (std::size_t e = 0; e < candidates_.size(); ++e) {
    auto& c = candidates_[e];
    std::sort(c.begin(), c.end());
    if (std::adjacent_find(c.begin(), c.end()) != c.end()) {
      throw ConfigError("edge " + std::to_string(e) + " lists an operator twice");
    }
    if (!c.empty() && c.back() >= space_->op_count()) {
      throw ConfigError("edge " + std::to_string(e) + " references an unknown operator index");
    }
    if (c.size() < space_->target_ops_per_edge) {
      throw ConfigError("edge " + std::to_string(e) + " has " + std::to_string(c.size()) +
                        " operators, fewer than target_ops_per_edge = " +
                        std::to_string(space_->target_ops_per_edge));
    }
  }
}

std::size_t SuperNet::slot_count() const noexcept {
  std::size_t n = 0;
  for (const auto& c : candidates_) n += c.size();
  return n;
}

SuperNet SuperNet::prune_operator(std::size_t edge, std::size_t position) const {
  if (edge >= candidates_.size()) {
    throw ConfigError("edge " + std::to_string(edge) + " out of range");
  }
  const auto& c = candidates_[edge];
  if (position >= c.size()) {
    throw ConfigError("operator position " + std::to_string(position) + " out of range on edge " +
                      std::to_string(edge));
  }
  if (c.size() <= target_ops_per_edge()) {
    throw ConfigError("pruning edge " + std::to_string(edge) + " would leave fewer than " +
                      std::to_string(target_ops_per_edge()) + " operators");
  }
  auto next = candidates_;
  next[edge].erase(next[edge].begin() + static_cast<std::ptrdiff_t>(position));
  return SuperNet(space_, std::move(next));
}

bool SuperNet::is_single_path() const noexcept {
  return std::all_of(candidates_.begin(), candidates_.end(),
                     [&](const auto& c) { return c.size() == target_ops_per_edge(); });
}

std::string SuperNet::encode() const {
  std::string out;
  for (std::size_t e = 0; e < candidates_.size(); ++e) {
    if (e) out += '|';
    out += 'e' + std::to_string(e) + ':';
    for (std::size_t k = 0; k < candidates_[e].size(); ++k) {
      if (k) out += '+';
      out += space_->operators[candidates_[e][k]].name;
    }
  }
  return out;
}

SuperNet build_supernet(std::shared_ptr<const SpaceConfig> config) {
  config->validate();
  std::vector<std::size_t> all(config->op_count());
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<std::vector<std::size_t>> candidates(config->edge_count(), all);
  return SuperNet(std::move(config), std::move(candidates));
}

SuperNet build_supernet(const SpaceConfig& config) {
  return build_supernet(std::make_shared<const SpaceConfig>(config));
}

SuperNet decode(std::string_view arch_id, std::shared_ptr<const SpaceConfig> config) {
  const auto edges = split(arch_id, '|');
  if (edges.size() != config->edge_count()) {
    throw ConfigError("architecture '" + std::string(arch_id) + "' has " +
                      std::to_string(edges.size()) + " edges, space '" + config->name + "' has " +
                      std::to_string(config->edge_count()));
  }
  std::vector<std::vector<std::size_t>> candidates;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto colon = edges[e].find(':');
    const std::string label = "e" + std::to_string(e);
    if (colon == std::string_view::npos || edges[e].substr(0, colon) != label) {
      throw ConfigError("architecture edge " + std::to_string(e) + " must look like '" + label +
                        ":<op>', got '" + std::string(edges[e]) + "'");
    }
    std::vector<std::size_t> ops;
    for (auto name : split(edges[e].substr(colon + 1), '+')) ops.push_back(config->op_index(name));
    candidates.push_back(std::move(ops));
  }
  return SuperNet(std::move(config), std::move(candidates));
}

SuperNet decode(std::string_view arch_id, const SpaceConfig& config) {
  return decode(arch_id, std::make_shared<const SpaceConfig>(config));
}

std::size_t architecture_count(const SpaceConfig& config) noexcept {
  const std::size_t per_edge = choose(config.op_count(), config.target_ops_per_edge);
  std::size_t total = 1;
  for (std::size_t e = 0; e < config.edge_count(); ++e) {
    if (per_edge != 0 && total > std::numeric_limits<std::size_t>::max() / per_edge) {
      return std::numeric_limits<std::size_t>::max();
    }
    total *= per_edge;
  }
  return total;
}

std::vector<std::string> enumerate_architectures(const SpaceConfig& config, std::size_t limit) {
  const std::size_t count = architecture_count(config);
  if (count > limit) {
    throw ConfigError("space '" + config.name + "' has " + std::to_string(count) +
                      " architectures, above the enumeration limit " + std::to_string(limit));
  }
  // All k-subsets of the operator list, in lexicographic order.
  std::vector<std::vector<std::size_t>> subsets;
  std::vector<std::size_t> pick;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (pick.size() == config.target_ops_per_edge) {
      subsets.push_back(pick);
      return;
    }
    for (std::size_t i = start; i < config.op_count(); ++i) {
      pick.push_back(i);
      rec(i + 1);
      pick.pop_back();
    }
  };
  rec(0);

  auto shared = std::make_shared<const SpaceConfig>(config);
  std::vector<std::string> out;
  out.reserve(count);
  std::vector<std::size_t> digits(config.edge_count(), 0);
  for (std::size_t n = 0; n < count; ++n) {
    std::vector<std::vector<std::size_t>> candidates;
    for (auto d : digits) candidates.push_back(subsets[d]);
    out.push_back(SuperNet(shared, std::move(candidates)).encode());
    for (std::size_t e = digits.size(); e-- > 0;) {
      if (++digits[e] < subsets.size()) break;
      digits[e] = 0;
    }
  }
  return out;
}

DepthWidth cell_depth_width(const SuperNet& net) {
  const auto& topo = net.space().topology;
  const auto& ops = net.space().operators;
  auto active = [&](std::size_t e) {
    const auto& c = net.candidates(e);
    return std::any_of(c.begin(), c.end(), [&](std::size_t op) { return ops[op].kind != OpKind::Zero; });
  };
  // Longest active path from any input node; -1 marks nodes no active path reaches.
  std::vector<long> longest(topo.node_count, -1);
  for (auto n : topo.input_nodes) longest[n] = 0;
  for (std::size_t node = 0; node < topo.node_count; ++node) {
    for (std::size_t e = 0; e < topo.edges.size(); ++e) {
      const auto& edge = topo.edges[e];
      if (edge.to != node || !active(e) || longest[edge.from] < 0) continue;
      longest[node] = std::max(longest[node], longest[edge.from] + 1);
    }
  }
  DepthWidth dw;
  for (auto n : topo.output_nodes) dw.depth = std::max<std::size_t>(dw.depth, longest[n] < 0 ? 0 : static_cast<std::size_t>(longest[n]));
  for (std::size_t e = 0; e < topo.edges.size(); ++e) {
    const auto& edge = topo.edges[e];
    if (active(e) && topo.is_input(edge.from) && topo.is_intermediate(edge.to)) ++dw.width;
  }
  return dw;
}

}  // namespace tenas::space
