#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tenas/matrix.hpp"
#include "tenas/nn/layers.hpp"
#include "tenas/nn/tensor.hpp"

namespace tenas::nn {

/// One bit per ReLU pre-activation unit (1 iff strictly positive), in graph
/// node order, for a single input sample.
class ActivationSignature {
 public:
  ActivationSignature() = default;
  explicit ActivationSignature(std::size_t bits) : words_((bits + 63) / 64, 0), bits_(bits) {}

  [[nodiscard]] std::size_t size() const noexcept { return bits_; }
  [[nodiscard]] bool bit(std::size_t i) const noexcept { return (words_[i / 64] >> (i % 64)) & 1U; }
  void set(std::size_t i) noexcept { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  [[nodiscard]] std::span<const std::uint64_t> words() const noexcept { return words_; }
  [[nodiscard]] std::uint64_t hash() const noexcept;

  friend bool operator==(const ActivationSignature&, const ActivationSignature&) = default;

 private:
  std::vector<std::uint64_t> words_;
  std::size_t bits_ = 0;
};

struct ParamEntry {
  std::string name;
  Shape shape;
  std::size_t offset = 0;
};

/// Flat parameter vector with named, ordered entries. Entry order follows
/// graph node order, so the Jacobian column of every scalar is fixed for a
/// given graph.
class ParamSet {
 public:
  ParamSet() = default;
  explicit ParamSet(std::vector<ParamEntry> entries);

  [[nodiscard]] const std::vector<ParamEntry>& entries() const noexcept { return entries_; }
  [[nodiscard]] std::size_t total_count() const noexcept { return values_.size(); }
  [[nodiscard]] std::span<double> values() noexcept { return values_; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

  [[nodiscard]] Tensor tensor(std::size_t entry) const;
  void assign(std::size_t entry, const Tensor& value);
  [[nodiscard]] std::optional<std::size_t> find(std::string_view name) const;

  void scale(double factor) noexcept;

 private:
  std::vector<ParamEntry> entries_;
  std::vector<double> values_;
};

struct GraphNode {
  std::string name;
  LayerPtr layer;  // null for the input node
  std::vector<int> inputs;
  Shape shape;  // per-sample output shape
  std::size_t param_offset = 0;
  std::size_t param_count = 0;
};

/// A DAG of layers. Node 0 is the network input. A node with several inputs
/// applies its layer to the elementwise sum of their outputs, which must
/// share one shape. Nodes are topologically ordered by construction.
class Graph {
 public:
  explicit Graph(Shape input_shape);

  [[nodiscard]] static constexpr int input() noexcept { return 0; }
  int add(std::string name, LayerPtr layer, std::vector<int> inputs);
  int add(std::string name, LayerPtr layer, int input) {
    return add(std::move(name), std::move(layer), std::vector<int>{input});
  }
  void set_output(int node);

  [[nodiscard]] const std::vector<GraphNode>& nodes() const noexcept { return nodes_; }
  [[nodiscard]] const GraphNode& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  [[nodiscard]] int output() const noexcept { return output_; }
  [[nodiscard]] const Shape& input_shape() const noexcept { return nodes_.front().shape; }
  [[nodiscard]] const Shape& output_shape() const { return node(output_).shape; }

  [[nodiscard]] std::size_t param_count() const noexcept { return param_count_; }
  [[nodiscard]] std::size_t relu_unit_count() const noexcept { return relu_units_; }
  [[nodiscard]] std::vector<ParamEntry> param_layout() const;

 private:
  std::vector<GraphNode> nodes_;
  int output_ = 0;
  std::size_t param_count_ = 0;
  std::size_t relu_units_ = 0;
};

enum class JacobianMode {
  SumLogits,  // one row per sample: d(sum_c z_c)/d theta
  PerLogit,   // one row per (sample, class), sample-major
};

struct ForwardResult {
  Tensor logits;  // [N, output dims...]
  std::vector<ActivationSignature> signatures;
};

/// A graph plus one parameter assignment. Immutable during evaluation:
/// forward and backward are const and safe to call concurrently.
class Network {
 public:
  explicit Network(std::shared_ptr<const Graph> graph);

  /// Kaiming-initializes every parameterized node. The per-node seed is
  /// derived from `seed` and the node's name, so a node keeps its values
  /// when unrelated nodes are added to or removed from the graph.
  void initialize(std::uint64_t seed);

  [[nodiscard]] const Graph& graph() const noexcept { return *graph_; }
  [[nodiscard]] const std::shared_ptr<const Graph>& graph_ptr() const noexcept { return graph_; }
  [[nodiscard]] ParamSet& params() noexcept { return params_; }
  [[nodiscard]] const ParamSet& params() const noexcept { return params_; }

  [[nodiscard]] ForwardResult forward(const Tensor& batch, bool capture_signatures = true) const;
  [[nodiscard]] std::vector<ActivationSignature> signatures(const Tensor& batch) const;

  /// Per-sample gradient of the network output w.r.t. all parameters, in
  /// ParamSet order. Shape (N x P) or (N*C x P) for PerLogit.
  [[nodiscard]] Matrix per_sample_jacobian(const Tensor& batch,
                                           JacobianMode mode = JacobianMode::SumLogits) const;

  /// Backpropagates `grad_logits` ([N, C]) and returns the batch-summed
  /// parameter gradient. Also returns the logits of the forward pass.
  [[nodiscard]] std::vector<double> parameter_gradient(const Tensor& batch,
                                                       const Tensor& grad_logits,
                                                       Tensor* logits_out = nullptr) const;

 private:
  struct Activations;
  [[nodiscard]] Activations run_forward(const Tensor& batch) const;
  void run_backward(const Activations& acts, const Tensor& grad_logits, GradTarget target) const;

  std::shared_ptr<const Graph> graph_;
  ParamSet params_;
};

}  // namespace tenas::nn
