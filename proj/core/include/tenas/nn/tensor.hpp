#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tenas::nn {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape) noexcept;
std::string shape_string(const Shape& shape);

/// Prepends a batch dimension to a per-sample shape.
Shape batched(std::size_t batch, const Shape& sample_shape);

/// Dense row-major double-precision array. Invariant: numel(shape) == size().
///
/// Batched tensors carry the batch as their leading dimension; `sample(n)`
/// views one sample's contiguous block.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  static Tensor standard_normal(Shape shape, std::uint64_t seed);

  [[nodiscard]] const Shape& shape() const noexcept { return shape_; }
  [[nodiscard]] std::size_t rank() const noexcept { return shape_.size(); }
  [[nodiscard]] std::size_t dim(std::size_t i) const { return shape_.at(i); }
  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
  [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

  [[nodiscard]] std::span<double> data() noexcept { return data_; }
  [[nodiscard]] std::span<const double> data() const noexcept { return data_; }
  [[nodiscard]] double* raw() noexcept { return data_.data(); }
  [[nodiscard]] const double* raw() const noexcept { return data_.data(); }

  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }

  [[nodiscard]] std::size_t batch() const { return shape_.at(0); }
  [[nodiscard]] std::size_t sample_size() const;
  [[nodiscard]] Shape sample_shape() const;
  [[nodiscard]] std::span<double> sample(std::size_t n);
  [[nodiscard]] std::span<const double> sample(std::size_t n) const;

  /// Copies samples [begin, end) into a new batched tensor.
  [[nodiscard]] Tensor slice(std::size_t begin, std::size_t end) const;

  void fill(double value) noexcept;
  /// Reshapes without touching data; throws if element counts differ.
  void reshape(Shape shape);
  /// Reallocates to `shape` and zero-fills, reusing capacity.
  void reset(const Shape& shape);

  [[nodiscard]] bool all_finite() const noexcept;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

}  // namespace tenas::nn
