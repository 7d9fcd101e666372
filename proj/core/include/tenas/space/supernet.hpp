#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "tenas/nn/network.hpp"
#include "tenas/space/space_config.hpp"

namespace tenas::space {

/// A cell space with the surviving candidate operators of every edge.
/// Values are immutable; pruning returns a new SuperNet.
///
/// Realized networks sum the outputs of all candidates on an edge with no
/// architecture weights.
class SuperNet {
 public:
  SuperNet(std::shared_ptr<const SpaceConfig> space,
           std::vector<std::vector<std::size_t>> candidates);

  [[nodiscard]] const SpaceConfig& space() const noexcept { return *space_; }
  [[nodiscard]] const std::shared_ptr<const SpaceConfig>& space_ptr() const noexcept { return space_; }

  [[nodiscard]] std::size_t edge_count() const noexcept { return candidates_.size(); }
  /// Surviving operator indices (into space().operators), ascending.
  [[nodiscard]] const std::vector<std::size_t>& candidates(std::size_t edge) const {
    return candidates_.at(edge);
  }
  [[nodiscard]] std::size_t slot_count() const noexcept;
  [[nodiscard]] std::size_t target_ops_per_edge() const noexcept { return space_->target_ops_per_edge; }
  [[nodiscard]] bool edge_prunable(std::size_t edge) const { return candidates(edge).size() > target_ops_per_edge(); }

  /// Removes the candidate at `position` of `edge`'s list. Throws ConfigError
  /// if the edge would drop below target_ops_per_edge.
  [[nodiscard]] SuperNet prune_operator(std::size_t edge, std::size_t position) const;

  [[nodiscard]] bool is_single_path() const noexcept;

  /// Canonical "e0:op|e1:op+op|..." encoding.
  [[nodiscard]] std::string encode() const;

  friend bool operator==(const SuperNet& a, const SuperNet& b) {
    return a.candidates_ == b.candidates_;
  }

 private:
  std::shared_ptr<const SpaceConfig> space_;
  std::vector<std::vector<std::size_t>> candidates_;
};

/// N_0: every edge carries the full operator list.
SuperNet build_supernet(const SpaceConfig& config);
SuperNet build_supernet(std::shared_ptr<const SpaceConfig> config);

/// Parses an ArchId. Throws ConfigError on unknown operator names, wrong
/// edge count or labels, duplicates, or edges below target_ops_per_edge.
SuperNet decode(std::string_view arch_id, std::shared_ptr<const SpaceConfig> config);
SuperNet decode(std::string_view arch_id, const SpaceConfig& config);

inline std::string encode(const SuperNet& net) { return net.encode(); }

inline bool is_single_path(const SuperNet& net) { return net.is_single_path(); }

inline SuperNet prune_operator(const SuperNet& net, std::size_t edge, std::size_t position) {
  return net.prune_operator(edge, position);
}

/// Every architecture keeping exactly target_ops_per_edge operators per edge,
/// in lexicographic order. Throws ConfigError if the count exceeds `limit`.
std::vector<std::string> enumerate_architectures(const SpaceConfig& config, std::size_t limit);

/// Number of single-path architectures (saturates at SIZE_MAX).
std::size_t architecture_count(const SpaceConfig& config) noexcept;

struct DepthWidth {
  std::size_t depth = 0;
  std::size_t width = 0;
};

/// Cell depth: most active (non-Zero) edges on any input-to-output path.
/// Cell width: active edges leaving an input node into an intermediate node.
/// An edge is active if any surviving candidate is not Zero.
DepthWidth cell_depth_width(const SuperNet& net);

/// Builds the stacked network: stem, cells (reduction cells at the
/// configured positions), classifier head.
std::shared_ptr<const nn::Graph> realize(const SuperNet& net);

}  // namespace tenas::space
