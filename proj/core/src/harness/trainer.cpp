#include "tenas/harness/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tenas/common.hpp"

namespace tenas::harness {

namespace {

/// Mean cross-entropy; writes d(loss)/d(logits) into grad.
double cross_entropy(const nn::Tensor& logits, const std::vector<std::size_t>& labels, nn::Tensor& grad) {
  const std::size_t n = logits.dim(0), c = logits.dim(1);
  const double inv_n = 1.0 / static_cast<double>(n);
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* z = logits.data().data() + i * c;
    double* g = grad.data().data() + i * c;
    const double zmax = *std::max_element(z, z + c);
    double total = 0.0;
    for (std::size_t k = 0; k < c; ++k) total += std::exp(z[k] - zmax);
    loss += std::log(total) + zmax - z[labels[i]];
    for (std::size_t k = 0; k < c; ++k) g[k] = std::exp(z[k] - zmax) / total * inv_n;
    g[labels[i]] -= inv_n;
  }
  return loss * inv_n;
}

}  // namespace

double accuracy(const nn::Tensor& logits, const std::vector<std::size_t>& labels) {
  const std::size_t n = logits.dim(0), c = logits.dim(1);
  if (n != labels.size()) throw InvalidArgument("accuracy: label count does not match logits");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* z = logits.data().data() + i * c;
    const auto best = static_cast<std::size_t>(std::max_element(z, z + c) - z);
    correct += best == labels[i];
  }
  return n == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(n);
}

TrainResult train_oracle(const space::SuperNet& arch, const Dataset& data, const TrainConfig& config) {
  if (!arch.is_single_path()) throw InvalidArgument("train_oracle needs a single-path architecture");
  const auto graph = space::realize(arch);
  if (graph->input_shape() != nn::Shape{2}) {
    throw ConfigError("the oracle trainer needs a vector space with 2-D inputs, got input shape " +
                      nn::shape_string(graph->input_shape()));
  }
  if (graph->output_shape().back() < data.classes) {
    throw ConfigError("the space has fewer output classes than the dataset");
  }
  if (!(config.lr > 0.0)) throw InvalidArgument("learning rate must be positive");

  const auto split = split_dataset(data, config.test_fraction, config.seed);
  nn::Network net(graph);
  net.initialize(stable_hash(config.seed, std::string_view("train"), arch.encode()));

  TrainResult result;
  auto logits = net.forward(split.train.inputs, false).logits;
  nn::Tensor grad(logits.shape());
  double loss = cross_entropy(logits, split.train.labels, grad);
  for (std::size_t epoch = 0; epoch < config.epochs && std::isfinite(loss); ++epoch) {
    const auto g = net.parameter_gradient(split.train.inputs, grad);
    auto params = net.params().values();
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= config.lr * g[i];
    result.epochs_run = epoch + 1;

    logits = net.forward(split.train.inputs, false).logits;
    const double next = cross_entropy(logits, split.train.labels, grad);
    const bool converged = std::abs(next - loss) < config.tolerance;
    loss = next;
    if (converged) break;
  }

  result.final_loss = loss;
  if (!std::isfinite(loss) || !logits.all_finite()) {
    result.diverged = true;
    return result;
  }
  result.train_accuracy = accuracy(logits, split.train.labels);
  result.test_accuracy = accuracy(net.forward(split.test.inputs, false).logits, split.test.labels);
  return result;
}

}  // namespace tenas::harness
