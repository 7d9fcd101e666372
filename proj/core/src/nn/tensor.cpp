#include "tenas/nn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

#include "tenas/common.hpp"

namespace tenas::nn {

std::size_t shape_numel(const Shape& shape) noexcept {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << ", ";
    out << shape[i];
  }
  out << ']';
  return out.str();
}

Shape batched(std::size_t batch, const Shape& sample_shape) {
  Shape s;
  s.reserve(sample_shape.size() + 1);
  s.push_back(batch);
  s.insert(s.end(), sample_shape.begin(), sample_shape.end());
  return s;
}

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), data_(shape_numel(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_numel(shape_) != data_.size()) {
    throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                     " does not match shape " + shape_string(shape_));
  }
}

Tensor Tensor::standard_normal(Shape shape, std::uint64_t seed) {
  Tensor t(std::move(shape));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& v : t.data_) v = normal(rng);
  return t;
}

std::size_t Tensor::sample_size() const {
  if (shape_.empty()) throw ShapeError("sample access on a rank-0 tensor");
  return shape_[0] == 0 ? shape_numel(sample_shape()) : data_.size() / shape_[0];
}

Shape Tensor::sample_shape() const {
  if (shape_.empty()) throw ShapeError("sample access on a rank-0 tensor");
  return Shape(shape_.begin() + 1, shape_.end());
}

std::span<double> Tensor::sample(std::size_t n) {
  const std::size_t k = sample_size();
  return std::span<double>(data_).subspan(n * k, k);
}

std::span<const double> Tensor::sample(std::size_t n) const {
  const std::size_t k = sample_size();
  return std::span<const double>(data_).subspan(n * k, k);
}

Tensor Tensor::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > batch()) {
    throw ShapeError("slice [" + std::to_string(begin) + ", " +
                     std::to_string(end) + ") out of range for batch " +
                     std::to_string(batch()));
  }
  const std::size_t k = sample_size();
  Shape s = shape_;
  s[0] = end - begin;
  return Tensor(std::move(s),
                std::vector<double>(data_.begin() + static_cast<std::ptrdiff_t>(begin * k),
                                    data_.begin() + static_cast<std::ptrdiff_t>(end * k)));
}

void Tensor::fill(double value) noexcept { std::fill(data_.begin(), data_.end(), value); }

void Tensor::reshape(Shape shape) {
  if (shape_numel(shape) != data_.size()) {
    throw ShapeError("cannot reshape " + shape_string(shape_) + " to " +
                     shape_string(shape));
  }
  shape_ = std::move(shape);
}

void Tensor::reset(const Shape& shape) {
  shape_ = shape;
  data_.assign(shape_numel(shape_), 0.0);
}

bool Tensor::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

}  // namespace tenas::nn
