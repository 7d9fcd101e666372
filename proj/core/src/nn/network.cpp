#include "tenas/nn/network.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "tenas/common.hpp"

namespace tenas::nn {

std::uint64_t ActivationSignature::hash() const noexcept {
  std::uint64_t h = splitmix64(bits_);
  for (auto w : words_) h = splitmix64(h ^ w);
  return h;
}

// ---- ParamSet ------------------------------------------------------------------

ParamSet::ParamSet(std::vector<ParamEntry> entries) : entries_(std::move(entries)) {
  std::size_t total = 0;
  for (auto& e : entries_) {
    if (e.offset != total) throw InvariantError("param entry '" + e.name + "' is not contiguous");
    total += shape_numel(e.shape);
  }
  values_.assign(total, 0.0);
}

Tensor ParamSet::tensor(std::size_t entry) const {
  const auto& e = entries_.at(entry);
  const std::size_t n = shape_numel(e.shape);
  return Tensor(e.shape, std::vector<double>(values_.begin() + static_cast<std::ptrdiff_t>(e.offset),
                                             values_.begin() + static_cast<std::ptrdiff_t>(e.offset + n)));
}

void ParamSet::assign(std::size_t entry, const Tensor& value) {
  const auto& e = entries_.at(entry);
  if (value.shape() != e.shape) {
    throw ShapeError("param '" + e.name + "' expects " + shape_string(e.shape) + ", got " +
                     shape_string(value.shape()));
  }
  std::copy(value.data().begin(), value.data().end(),
            values_.begin() + static_cast<std::ptrdiff_t>(e.offset));
}

std::optional<std::size_t> ParamSet::find(std::string_view name) const {
  for (std::size_t i = 0; i < entries_.size(); ++i)
    if (entries_[i].name == name) return i;
  return std::nullopt;
}

void ParamSet::scale(double factor) noexcept {
  for (auto& v : values_) v *= factor;
}

// ---- Graph -----------------------------------------------------------------------

Graph::Graph(Shape input_shape) {
  if (input_shape.empty() || shape_numel(input_shape) == 0) {
    throw ConfigError("graph input shape must be non-empty, got " + shape_string(input_shape));
  }
  nodes_.push_back(GraphNode{"input", nullptr, {}, std::move(input_shape), 0, 0});
}

int Graph::add(std::string name, LayerPtr layer, std::vector<int> inputs) {
  if (!layer) throw InvariantError("node '" + name + "' has no layer");
  if (inputs.empty()) throw ShapeError("node '" + name + "' has no inputs");
  for (const auto& n : nodes_) {
    if (n.name == name) throw InvariantError("duplicate graph node name '" + name + "'");
  }
  const int id = static_cast<int>(nodes_.size());
  for (int in : inputs) {
    if (in < 0 || in >= id) {
      throw InvariantError("node '" + name + "' references invalid input " + std::to_string(in));
    }
  }
  const Shape& in_shape = node(inputs.front()).shape;
  for (int in : inputs) {
    if (node(in).shape != in_shape) {
      throw ShapeError("node '" + name + "' (" + layer->describe() + ") sums inputs of shape " +
                       shape_string(in_shape) + " and " + shape_string(node(in).shape) +
                       " from '" + node(in).name + "'");
    }
  }
  Shape out;
  try {
    out = layer->output_shape(in_shape);
  } catch (const ShapeError& e) {
    throw ShapeError("layer '" + name + "': " + e.what());
  }
  const std::size_t pc = layer->param_count();
  if (layer->is_relu()) relu_units_ += shape_numel(in_shape);
  nodes_.push_back(GraphNode{std::move(name), std::move(layer), std::move(inputs), std::move(out),
                             param_count_, pc});
  param_count_ += pc;
  output_ = id;
  return id;
}

void Graph::set_output(int node_id) {
  if (node_id < 0 || node_id >= static_cast<int>(nodes_.size())) {
    throw InvariantError("output node " + std::to_string(node_id) + " out of range");
  }
  output_ = node_id;
}

std::vector<ParamEntry> Graph::param_layout() const {
  std::vector<ParamEntry> entries;
  for (const auto& n : nodes_) {
    if (!n.layer) continue;
    std::size_t off = n.param_offset;
    for (const auto& spec : n.layer->param_specs()) {
      entries.push_back({n.name + "." + spec.name, spec.shape, off});
      off += shape_numel(spec.shape);
    }
  }
  return entries;
}

// ---- Network ---------------------------------------------------------------------

struct Network::Activations {
  std::vector<Tensor> out;
  std::vector<Tensor> summed;  // layer input for multi-input nodes
  std::size_t batch = 0;

  [[nodiscard]] const Tensor& input_of(const Graph& g, int id) const {
    const auto& node = g.node(id);
    if (node.inputs.size() == 1) return out[static_cast<std::size_t>(node.inputs.front())];
    return summed[static_cast<std::size_t>(id)];
  }
};

Network::Network(std::shared_ptr<const Graph> graph)
    : graph_(std::move(graph)), params_(graph_->param_layout()) {}

void Network::initialize(std::uint64_t seed) {
  for (const auto& node : graph_->nodes()) {
    if (!node.layer || node.param_count == 0) continue;
    const auto values = kaiming_init(*node.layer, stable_hash(seed, node.name));
    double* dst = params_.values().data() + node.param_offset;
    for (const auto& t : values) {
      std::copy(t.data().begin(), t.data().end(), dst);
      dst += t.size();
    }
  }
}

Network::Activations Network::run_forward(const Tensor& batch) const {
  const Graph& g = *graph_;
  if (batch.rank() == 0 || batch.sample_shape() != g.input_shape()) {
    const std::string consumer = g.nodes().size() > 1 ? g.nodes()[1].name : "input";
    throw ShapeError("batch " + shape_string(batch.shape()) + " does not match input shape " +
                     shape_string(g.input_shape()) + " expected by layer '" + consumer + "'");
  }
  Activations acts;
  acts.batch = batch.batch();
  const auto count = g.nodes().size();
  acts.out.resize(count);
  acts.summed.resize(count);
  acts.out[0] = batch;
  const double* params = params_.values().data();
  for (std::size_t i = 1; i < count; ++i) {
    const auto& node = g.nodes()[i];
    if (node.inputs.size() > 1) {
      Tensor& sum = acts.summed[i];
      sum = acts.out[static_cast<std::size_t>(node.inputs.front())];
      for (std::size_t k = 1; k < node.inputs.size(); ++k) {
        const auto src = acts.out[static_cast<std::size_t>(node.inputs[k])].data();
        auto dst = sum.data();
        for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
      }
    }
    Tensor& out = acts.out[i];
    out.reset(batched(acts.batch, node.shape));
    if (!node.layer->is_zero()) {
      node.layer->forward(acts.input_of(g, static_cast<int>(i)), out, params + node.param_offset);
    }
  }
  return acts;
}

ForwardResult Network::forward(const Tensor& batch, bool capture_signatures) const {
  Activations acts = run_forward(batch);
  const Graph& g = *graph_;
  ForwardResult result;
  if (capture_signatures) {
    result.signatures.assign(acts.batch, ActivationSignature(g.relu_unit_count()));
    std::size_t bit = 0;
    for (std::size_t i = 1; i < g.nodes().size(); ++i) {
      if (!g.nodes()[i].layer->is_relu()) continue;
      const Tensor& pre = acts.input_of(g, static_cast<int>(i));
      const std::size_t units = pre.sample_size();
      for (std::size_t n = 0; n < acts.batch; ++n) {
        const double* x = pre.raw() + n * units;
        auto& sig = result.signatures[n];
        for (std::size_t u = 0; u < units; ++u)
          if (x[u] > 0.0) sig.set(bit + u);
      }
      bit += units;
    }
  }
  result.logits = std::move(acts.out[static_cast<std::size_t>(g.output())]);
  return result;
}

std::vector<ActivationSignature> Network::signatures(const Tensor& batch) const {
  return forward(batch, true).signatures;
}

void Network::run_backward(const Activations& acts, const Tensor& grad_logits,
                           GradTarget target) const {
  const Graph& g = *graph_;
  const auto count = g.nodes().size();
  std::vector<Tensor> grads(count);
  grads[static_cast<std::size_t>(g.output())] = grad_logits;
  const double* params = params_.values().data();
  Tensor scratch;

  for (std::size_t i = count - 1; i >= 1; --i) {
    if (grads[i].empty()) continue;
    const auto& node = g.nodes()[i];
    if (node.layer->is_zero()) continue;
    const Tensor& in = acts.input_of(g, static_cast<int>(i));
    const GradTarget layer_target{target.base + node.param_offset, target.row_stride};

    auto ensure = [&](int id) -> Tensor& {
      Tensor& t = grads[static_cast<std::size_t>(id)];
      if (t.empty()) t.reset(acts.out[static_cast<std::size_t>(id)].shape());
      return t;
    };

    Tensor* grad_in = nullptr;
    const bool needs_input_grad =
        std::any_of(node.inputs.begin(), node.inputs.end(), [](int id) { return id != 0; });
    if (needs_input_grad) {
      if (node.inputs.size() == 1) {
        grad_in = &ensure(node.inputs.front());
      } else {
        scratch.reset(in.shape());
        grad_in = &scratch;
      }
    }
    node.layer->backward(in, acts.out[i], grads[i], grad_in, params + node.param_offset,
                         layer_target);
    if (grad_in == &scratch) {
      for (int id : node.inputs) {
        if (id == 0) continue;
        auto dst = ensure(id).data();
        const auto src = scratch.data();
        for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
      }
    }
    grads[i] = Tensor();
  }
}

Matrix Network::per_sample_jacobian(const Tensor& batch, JacobianMode mode) const {
  const Activations acts = run_forward(batch);
  const std::size_t n = acts.batch;
  const std::size_t p = params_.total_count();
  const Tensor& logits = acts.out[static_cast<std::size_t>(graph_->output())];
  const std::size_t classes = logits.sample_size();

  if (mode == JacobianMode::SumLogits) {
    Matrix jac(n, p);
    run_backward(acts, Tensor(logits.shape(), 1.0), GradTarget{jac.data().data(), p});
    return jac;
  }
  Matrix jac(n * classes, p);
  for (std::size_t c = 0; c < classes; ++c) {
    Tensor seed(logits.shape(), 0.0);
    for (std::size_t s = 0; s < n; ++s) seed.raw()[s * classes + c] = 1.0;
    run_backward(acts, seed, GradTarget{jac.data().data() + c * p, classes * p});
  }
  return jac;
}

std::vector<double> Network::parameter_gradient(const Tensor& batch, const Tensor& grad_logits,
                                                Tensor* logits_out) const {
  const Activations acts = run_forward(batch);
  const Tensor& logits = acts.out[static_cast<std::size_t>(graph_->output())];
  if (grad_logits.shape() != logits.shape()) {
    throw ShapeError("gradient " + shape_string(grad_logits.shape()) + " does not match logits " +
                     shape_string(logits.shape()));
  }
  std::vector<double> grad(params_.total_count(), 0.0);
  run_backward(acts, grad_logits, GradTarget{grad.data(), 0});
  if (logits_out) *logits_out = logits;
  return grad;
}

}  // namespace tenas::nn
