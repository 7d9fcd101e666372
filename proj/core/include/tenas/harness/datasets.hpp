#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "tenas/nn/tensor.hpp"

namespace tenas::harness {

enum class DatasetKind { Spiral, Moons, Gaussians };

std::string_view dataset_name(DatasetKind kind) noexcept;
DatasetKind parse_dataset(std::string_view name);

/// Labelled 2-D points. inputs is [n, 2]; labels[i] < classes.
struct Dataset {
  nn::Tensor inputs;
  std::vector<std::size_t> labels;
  std::size_t classes = 2;

  [[nodiscard]] std::size_t size() const noexcept { return labels.size(); }
};

/// Interleaved spirals: class k, parameter t in [kSpiralStart, 1] sits at
/// radius t and angle 2*pi*(kSpiralTurns*t + k/classes).
inline constexpr double kSpiralTurns = 1.25;
inline constexpr double kSpiralStart = 0.1;

/// Point i belongs to class i % classes, so classes are balanced to within
/// one point. Gaussian noise with std `noise` is added to every coordinate
/// (for gaussians it is the cluster std). Moons supports two classes only.
Dataset make_dataset(DatasetKind kind, std::size_t n, double noise, std::uint64_t seed,
                     std::size_t classes = 2);

struct Split {
  Dataset train;
  Dataset test;
};

/// Seeded shuffle, then the first round(test_fraction * n) points are held out.
Split split_dataset(const Dataset& data, double test_fraction, std::uint64_t seed);

}  // namespace tenas::harness
