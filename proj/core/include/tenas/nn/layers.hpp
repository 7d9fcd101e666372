#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tenas/nn/tensor.hpp"

namespace tenas::nn {

/// One trainable parameter tensor of a layer.
struct ParamSpec {
  std::string name;  // suffix, e.g. "weight"
  Shape shape;
  std::size_t fan_in = 0;
  bool is_bias = false;
};

/// Where a backward pass deposits parameter gradients. Sample n's gradient
/// for the layer's k-th scalar parameter is accumulated into
/// `base[n * row_stride + k]`; a zero stride sums over the batch.
struct GradTarget {
  double* base = nullptr;
  std::size_t row_stride = 0;

  [[nodiscard]] double* row(std::size_t n) const noexcept { return base + n * row_stride; }
};

/// A primitive differentiable layer. Layers are immutable and hold no
/// parameter storage; the owning network passes a pointer to the layer's
/// contiguous parameter block.
///
/// Tensors handed to forward/backward are batched: [N, sample dims...].
/// `forward` overwrites `out`, which the caller has sized. `backward`
/// accumulates into `grad_in` (may be null) and into `grads`.
class Layer {
 public:
  virtual ~Layer() = default;

  [[nodiscard]] virtual std::string_view kind() const noexcept = 0;
  [[nodiscard]] virtual std::string describe() const { return std::string(kind()); }
  [[nodiscard]] virtual Shape output_shape(const Shape& in) const = 0;
  [[nodiscard]] virtual std::vector<ParamSpec> param_specs() const { return {}; }
  [[nodiscard]] std::size_t param_count() const;

  [[nodiscard]] virtual bool is_relu() const noexcept { return false; }
  [[nodiscard]] virtual bool is_zero() const noexcept { return false; }

  virtual void forward(const Tensor& in, Tensor& out, const double* params) const = 0;
  virtual void backward(const Tensor& in, const Tensor& out, const Tensor& grad_out,
                        Tensor* grad_in, const double* params, GradTarget grads) const = 0;
};

using LayerPtr = std::shared_ptr<const Layer>;

/// Kaiming-normal initialization: weights ~ N(0, 2 / fan_in), biases 0.
/// Returns one tensor per entry of `layer.param_specs()`; empty for
/// parameter-free layers. Deterministic in `seed`.
std::vector<Tensor> kaiming_init(const Layer& layer, std::uint64_t seed);

/// Outputs zeros. The output shape defaults to the input shape; a fixed
/// shape is used where the operator changes resolution or width.
class Zero final : public Layer {
 public:
  Zero() = default;
  explicit Zero(Shape out_shape) : out_shape_(std::move(out_shape)) {}

  std::string_view kind() const noexcept override { return "zero"; }
  Shape output_shape(const Shape& in) const override;
  bool is_zero() const noexcept override { return true; }
  void forward(const Tensor& in, Tensor& out, const double* params) const override;
  void backward(const Tensor&, const Tensor&, const Tensor&, Tensor*, const double*,
                GradTarget) const override {}

 private:
  std::optional<Shape> out_shape_;
};

class Identity final : public Layer {
 public:
  std::string_view kind() const noexcept override { return "identity"; }
  Shape output_shape(const Shape& in) const override { return in; }
  void forward(const Tensor& in, Tensor& out, const double* params) const override;
  void backward(const Tensor& in, const Tensor& out, const Tensor& grad_out, Tensor* grad_in,
                const double* params, GradTarget grads) const override;
};

/// ReLU with derivative 0 at 0.
class ReLU final : public Layer {
 public:
  std::string_view kind() const noexcept override { return "relu"; }
  Shape output_shape(const Shape& in) const override { return in; }
  bool is_relu() const noexcept override { return true; }
  void forward(const Tensor& in, Tensor& out, const double* params) const override;
  void backward(const Tensor& in, const Tensor& out, const Tensor& grad_out, Tensor* grad_in,
                const double* params, GradTarget grads) const override;
};

/// Fully connected layer over the flattened sample: y = W x (+ b).
class Linear final : public Layer {
 public:
  Linear(std::size_t in_features, std::size_t out_features, bool bias = true);

  std::string_view kind() const noexcept override { return "linear"; }
  std::string describe() const override;
  Shape output_shape(const Shape& in) const override;
  std::vector<ParamSpec> param_specs() const override;
  void forward(const Tensor& in, Tensor& out, const double* params) const override;
  void backward(const Tensor& in, const Tensor& out, const Tensor& grad_out, Tensor* grad_in,
                const double* params, GradTarget grads) const override;

  [[nodiscard]] std::size_t in_features() const noexcept { return in_; }
  [[nodiscard]] std::size_t out_features() const noexcept { return out_; }
  [[nodiscard]] bool has_bias() const noexcept { return bias_; }

 private:
  std::size_t in_;
  std::size_t out_;
  bool bias_;
};

struct Conv2dOptions {
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  std::size_t kernel = 3;
  std::size_t stride = 1;
  std::size_t padding = 0;
  std::size_t dilation = 1;
  std::size_t groups = 1;
  bool bias = false;
};

/// 2-D convolution on [C, H, W] samples with grouping and dilation.
class Conv2d final : public Layer {
 public:
  explicit Conv2d(Conv2dOptions options);

  std::string_view kind() const noexcept override { return "conv"; }
  std::string describe() const override;
  Shape output_shape(const Shape& in) const override;
  std::vector<ParamSpec> param_specs() const override;
  void forward(const Tensor& in, Tensor& out, const double* params) const override;
  void backward(const Tensor& in, const Tensor& out, const Tensor& grad_out, Tensor* grad_in,
                const double* params, GradTarget grads) const override;

  [[nodiscard]] const Conv2dOptions& options() const noexcept { return opt_; }

 private:
  Conv2dOptions opt_;
};

enum class PoolMode { Average, Max };

/// Average (padding excluded from the count) or max pooling.
class Pool2d final : public Layer {
 public:
  Pool2d(PoolMode mode, std::size_t kernel, std::size_t stride, std::size_t padding);

  std::string_view kind() const noexcept override {
    return mode_ == PoolMode::Average ? "avg_pool" : "max_pool";
  }
  std::string describe() const override;
  Shape output_shape(const Shape& in) const override;
  void forward(const Tensor& in, Tensor& out, const double* params) const override;
  void backward(const Tensor& in, const Tensor& out, const Tensor& grad_out, Tensor* grad_in,
                const double* params, GradTarget grads) const override;

 private:
  PoolMode mode_;
  std::size_t kernel_;
  std::size_t stride_;
  std::size_t padding_;
};

/// Appends zero channels: [C, H, W] -> [out_channels, H, W].
class ChannelPad final : public Layer {
 public:
  explicit ChannelPad(std::size_t out_channels) : out_channels_(out_channels) {}

  std::string_view kind() const noexcept override { return "channel_pad"; }
  Shape output_shape(const Shape& in) const override;
  void forward(const Tensor& in, Tensor& out, const double* params) const override;
  void backward(const Tensor& in, const Tensor& out, const Tensor& grad_out, Tensor* grad_in,
                const double* params, GradTarget grads) const override;

 private:
  std::size_t out_channels_;
};

/// [C, H, W] -> [C] by spatial averaging.
class GlobalAvgPool final : public Layer {
 public:
  std::string_view kind() const noexcept override { return "global_avg_pool"; }
  Shape output_shape(const Shape& in) const override;
  void forward(const Tensor& in, Tensor& out, const double* params) const override;
  void backward(const Tensor& in, const Tensor& out, const Tensor& grad_out, Tensor* grad_in,
                const double* params, GradTarget grads) const override;
};

/// Non-affine batch normalization over the batch (and spatial dims for
/// [C, H, W] samples). The batch statistics are constants under
/// differentiation, so backward is a per-channel rescale. This couples
/// samples in forward; it is off unless a space config enables it.
class BatchNorm final : public Layer {
 public:
  explicit BatchNorm(double eps = 1e-5) : eps_(eps) {}

  std::string_view kind() const noexcept override { return "batch_norm"; }
  Shape output_shape(const Shape& in) const override { return in; }
  void forward(const Tensor& in, Tensor& out, const double* params) const override;
  void backward(const Tensor& in, const Tensor& out, const Tensor& grad_out, Tensor* grad_in,
                const double* params, GradTarget grads) const override;

 private:
  double eps_;
};

}  // namespace tenas::nn
