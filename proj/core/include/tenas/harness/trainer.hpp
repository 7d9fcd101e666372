#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "tenas/harness/datasets.hpp"
#include "tenas/space/supernet.hpp"

namespace tenas::harness {

struct TrainConfig {
  std::size_t epochs = 2000;
  double lr = 0.1;
  std::uint64_t seed = 0;
  double test_fraction = 0.3;
  /// Training stops once the loss changes by less than this between epochs.
  double tolerance = 1e-5;
};

struct TrainResult {
  double test_accuracy = 0.0;
  double train_accuracy = 0.0;
  double final_loss = 0.0;
  std::size_t epochs_run = 0;
  bool diverged = false;  // loss became non-finite; accuracies are then 0
};

/// Trains a single-path architecture with full-batch gradient descent on the
/// mean cross-entropy of the training split and reports held-out accuracy.
/// Initialization and split derive from config.seed (and the ArchId).
TrainResult train_oracle(const space::SuperNet& arch, const Dataset& data, const TrainConfig& config);

/// Fraction of rows of `logits` ([n, C]) whose argmax (lowest index on ties)
/// equals the label.
double accuracy(const nn::Tensor& logits, const std::vector<std::size_t>& labels);

}  // namespace tenas::harness
