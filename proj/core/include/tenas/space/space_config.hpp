#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tenas/nn/tensor.hpp"

namespace tenas::space {

struct Edge {
  std::size_t from = 0;
  std::size_t to = 0;
};

/// Cell DAG. Edges always point from a lower to a higher node index, so the
/// node order is a topological order. The cell output is the sum of
/// `output_nodes` (a single node for NAS-Bench-201-style cells, all
/// intermediate nodes for DARTS-style cells).
struct CellTopology {
  std::size_t node_count = 0;
  std::vector<Edge> edges;
  std::vector<std::size_t> input_nodes;
  std::vector<std::size_t> output_nodes;

  /// Throws ConfigError on back edges, orphan nodes, or dangling nodes.
  void validate() const;

  [[nodiscard]] bool is_input(std::size_t node) const;
  [[nodiscard]] bool is_output(std::size_t node) const;
  /// Non-input nodes, excluding a sole output node that feeds nothing.
  [[nodiscard]] bool is_intermediate(std::size_t node) const;
};

enum class OpKind { Zero, Skip, Conv, AvgPool, MaxPool, SepConv, DilConv, Linear };

std::string_view op_kind_name(OpKind kind) noexcept;

struct OperatorSpec {
  std::string name;
  OpKind kind = OpKind::Zero;
  std::size_t kernel = 3;  // conv / pool kinds
  std::size_t depth = 1;   // linear: number of ReLU->Linear blocks
};

struct StackingConfig {
  std::size_t cells = 1;
  std::size_t channels = 8;
  std::vector<std::size_t> reductions;
  nn::Shape input_shape;  // [C, H, W] or [D]
  std::size_t classes = 10;
  bool batch_norm = false;
};

/// A cell-based search space: topology, operator set O, stacking, and the
/// number of operators each edge keeps in a final architecture.
struct SpaceConfig {
  std::string name;
  CellTopology topology;
  std::vector<OperatorSpec> operators;
  StackingConfig stacking;
  std::size_t target_ops_per_edge = 1;

  [[nodiscard]] std::size_t edge_count() const noexcept { return topology.edges.size(); }
  [[nodiscard]] std::size_t op_count() const noexcept { return operators.size(); }
  [[nodiscard]] bool image_input() const noexcept { return stacking.input_shape.size() == 3; }
  /// Index of the operator with this name; throws ConfigError if unknown.
  [[nodiscard]] std::size_t op_index(std::string_view op_name) const;

  void validate() const;

  static SpaceConfig from_json(std::string_view text);
  static SpaceConfig load(const std::filesystem::path& path);
  [[nodiscard]] std::string to_json() const;
};

/// Names of the compiled-in presets.
std::vector<std::string> preset_names();
/// A compiled-in preset ("nasbench201-like", "darts-like", "toy-mlp").
SpaceConfig preset(std::string_view name);
/// Loads a preset by name, or a space-config file by path.
SpaceConfig load_space(std::string_view name_or_path);

}  // namespace tenas::space
