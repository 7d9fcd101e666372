#include "tenas/harness/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "tenas/common.hpp"

namespace tenas::harness {

std::string_view dataset_name(DatasetKind kind) noexcept {
  switch (kind) {
    case DatasetKind::Spiral: return "spiral";
    case DatasetKind::Moons: return "moons";
    case DatasetKind::Gaussians: return "gaussians";
  }
  return "?";
}

DatasetKind parse_dataset(std::string_view name) {
  for (auto k : {DatasetKind::Spiral, DatasetKind::Moons, DatasetKind::Gaussians})
    if (dataset_name(k) == name) return k;
  throw ConfigError("unknown dataset '" + std::string(name) + "' (expected spiral, moons, gaussians)");
}

Dataset make_dataset(DatasetKind kind, std::size_t n, double noise, std::uint64_t seed,
                     std::size_t classes) {
  if (classes < 2) throw InvalidArgument("a dataset needs at least two classes");
  if (n < classes) {
    throw InvalidArgument("dataset size " + std::to_string(n) + " is below the class count " +
                          std::to_string(classes));
  }
  if (kind == DatasetKind::Moons && classes != 2) throw InvalidArgument("moons has exactly two classes");
  if (!(noise >= 0.0)) throw InvalidArgument("noise must be non-negative");

  std::mt19937_64 rng(stable_hash(seed, std::string_view("dataset"), dataset_name(kind)));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  constexpr double pi = std::numbers::pi;

  Dataset data{nn::Tensor({n, 2}), std::vector<std::size_t>(n), classes};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = i % classes;
    const double kk = static_cast<double>(k);
    double x = 0.0, y = 0.0;
    switch (kind) {
      case DatasetKind::Spiral: {
        const double t = kSpiralStart + (1.0 - kSpiralStart) * unit(rng);
        const double angle = 2.0 * pi * (kSpiralTurns * t + kk / static_cast<double>(classes));
        x = t * std::cos(angle);
        y = t * std::sin(angle);
        break;
      }
      case DatasetKind::Moons: {
        const double t = pi * unit(rng);
        x = k == 0 ? std::cos(t) : 1.0 - std::cos(t);
        y = k == 0 ? std::sin(t) : 0.5 - std::sin(t);
        break;
      }
      case DatasetKind::Gaussians: {
        const double angle = 2.0 * pi * kk / static_cast<double>(classes);
        x = 2.0 * std::cos(angle);
        y = 2.0 * std::sin(angle);
        break;
      }
    }
    if (noise > 0.0) {
      x += noise * gauss(rng);
      y += noise * gauss(rng);
    }
    data.inputs[2 * i] = x;
    data.inputs[2 * i + 1] = y;
    data.labels[i] = k;
  }
  return data;
}

namespace {

Dataset gather(const Dataset& data, std::span<const std::size_t> idx) {
  Dataset out{nn::Tensor({idx.size(), 2}), std::vector<std::size_t>(idx.size()), data.classes};
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.inputs[2 * i] = data.inputs[2 * idx[i]];
    out.inputs[2 * i + 1] = data.inputs[2 * idx[i] + 1];
    out.labels[i] = data.labels[idx[i]];
  }
  return out;
}

}  // namespace

Split split_dataset(const Dataset& data, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw InvalidArgument("test fraction must lie in (0, 1)");
  }
  std::vector<std::size_t> idx(data.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(stable_hash(seed, std::string_view("split")));
  std::shuffle(idx.begin(), idx.end(), rng);
  auto held = static_cast<std::size_t>(std::lround(test_fraction * static_cast<double>(idx.size())));
  held = std::clamp<std::size_t>(held, 1, idx.size() - 1);
  const std::span<const std::size_t> all(idx);
  return {gather(data, all.subspan(held)), gather(data, all.first(held))};
}

}  // namespace tenas::harness
