#include "tenas/nn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "tenas/common.hpp"

namespace tenas::nn {

namespace {

void require_rank(const Layer& layer, const Shape& in, std::size_t rank) {
  if (in.size() != rank) {
    throw ShapeError(layer.describe() + ": expected rank-" + std::to_string(rank) +
                     " sample, got " + shape_string(in));
  }
}

std::size_t conv_extent(std::size_t size, std::size_t kernel, std::size_t stride,
                        std::size_t padding, std::size_t dilation) {
  const std::size_t span = dilation * (kernel - 1) + 1;
  if (size + 2 * padding < span) return 0;
  return (size + 2 * padding - span) / stride + 1;
}

void add_into(std::span<double> dst, std::span<const double> src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

}  // namespace

std::size_t Layer::param_count() const {
  std::size_t total = 0;
  for (const auto& spec : param_specs()) total += shape_numel(spec.shape);
  return total;
}

std::vector<Tensor> kaiming_init(const Layer& layer, std::uint64_t seed) {
  std::vector<Tensor> out;
  std::mt19937_64 rng(seed);
  for (const auto& spec : layer.param_specs()) {
    Tensor t(spec.shape);
    if (!spec.is_bias) {
      if (spec.fan_in == 0) throw InvariantError(layer.describe() + ": zero fan_in");
      std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / static_cast<double>(spec.fan_in)));
      for (auto& v : t.data()) v = normal(rng);
    }
    out.push_back(std::move(t));
  }
  return out;
}

// ---- Zero ------------------------------------------------------------------

Shape Zero::output_shape(const Shape& in) const { return out_shape_ ? *out_shape_ : in; }

void Zero::forward(const Tensor&, Tensor& out, const double*) const { out.fill(0.0); }

// ---- Identity ----------------------------------------------------------------

void Identity::forward(const Tensor& in, Tensor& out, const double*) const {
  std::copy(in.data().begin(), in.data().end(), out.data().begin());
}

void Identity::backward(const Tensor&, const Tensor&, const Tensor& grad_out, Tensor* grad_in,
                        const double*, GradTarget) const {
  if (grad_in) add_into(grad_in->data(), grad_out.data());
}

// ---- ReLU ------------------------------------------------------------------

void ReLU::forward(const Tensor& in, Tensor& out, const double*) const {
  const auto src = in.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] > 0.0 ? src[i] : 0.0;
}

void ReLU::backward(const Tensor& in, const Tensor&, const Tensor& grad_out, Tensor* grad_in,
                    const double*, GradTarget) const {
  if (!grad_in) return;
  const auto x = in.data();
  const auto g = grad_out.data();
  auto gi = grad_in->data();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0) gi[i] += g[i];
  }
}

// ---- Linear ------------------------------------------------------------------

Linear::Linear(std::size_t in_features, std::size_t out_features, bool bias)
    : in_(in_features), out_(out_features), bias_(bias) {
  if (in_ == 0 || out_ == 0) throw ConfigError("linear layer needs nonzero widths");
}

std::string Linear::describe() const {
  std::ostringstream s;
  s << "linear(" << in_ << "->" << out_ << (bias_ ? "" : ", no bias") << ')';
  return s.str();
}

Shape Linear::output_shape(const Shape& in) const {
  if (shape_numel(in) != in_) {
    throw ShapeError(describe() + ": input " + shape_string(in) + " has " +
                     std::to_string(shape_numel(in)) + " features, expected " +
                     std::to_string(in_));
  }
  return {out_};
}

std::vector<ParamSpec> Linear::param_specs() const {
  std::vector<ParamSpec> specs{{"weight", {out_, in_}, in_, false}};
  if (bias_) specs.push_back({"bias", {out_}, in_, true});
  return specs;
}

void Linear::forward(const Tensor& in, Tensor& out, const double* params) const {
  const double* w = params;
  const double* b = bias_ ? params + out_ * in_ : nullptr;
  const std::size_t batch = in.batch();
  for (std::size_t n = 0; n < batch; ++n) {
    const double* x = in.raw() + n * in_;
    double* y = out.raw() + n * out_;
    for (std::size_t o = 0; o < out_; ++o) {
      const double* row = w + o * in_;
      double acc = b ? b[o] : 0.0;
      for (std::size_t i = 0; i < in_; ++i) acc += row[i] * x[i];
      y[o] = acc;
    }
  }
}

void Linear::backward(const Tensor& in, const Tensor&, const Tensor& grad_out, Tensor* grad_in,
                      const double* params, GradTarget grads) const {
  const double* w = params;
  const std::size_t batch = in.batch();
  for (std::size_t n = 0; n < batch; ++n) {
    const double* x = in.raw() + n * in_;
    const double* g = grad_out.raw() + n * out_;
    double* gw = grads.row(n);
    double* gb = gw + out_ * in_;
    for (std::size_t o = 0; o < out_; ++o) {
      const double go = g[o];
      if (go == 0.0) continue;
      double* gw_row = gw + o * in_;
      for (std::size_t i = 0; i < in_; ++i) gw_row[i] += go * x[i];
      if (bias_) gb[o] += go;
    }
    if (grad_in) {
      double* gi = grad_in->raw() + n * in_;
      for (std::size_t o = 0; o < out_; ++o) {
        const double go = g[o];
        if (go == 0.0) continue;
        const double* row = w + o * in_;
        for (std::size_t i = 0; i < in_; ++i) gi[i] += go * row[i];
      }
    }
  }
}

// ---- Conv2d ------------------------------------------------------------------

Conv2d::Conv2d(Conv2dOptions options) : opt_(options) {
  if (opt_.in_channels == 0 || opt_.out_channels == 0 || opt_.kernel == 0 ||
      opt_.stride == 0 || opt_.dilation == 0 || opt_.groups == 0) {
    throw ConfigError("conv layer has a zero-sized option");
  }
  if (opt_.in_channels % opt_.groups || opt_.out_channels % opt_.groups) {
    throw ConfigError("conv channels must be divisible by groups");
  }
}

std::string Conv2d::describe() const {
  std::ostringstream s;
  s << "conv" << opt_.kernel << 'x' << opt_.kernel << '(' << opt_.in_channels << "->"
    << opt_.out_channels << ", s" << opt_.stride << ", p" << opt_.padding;
  if (opt_.dilation != 1) s << ", d" << opt_.dilation;
  if (opt_.groups != 1) s << ", g" << opt_.groups;
  s << ')';
  return s.str();
}

Shape Conv2d::output_shape(const Shape& in) const {
  require_rank(*this, in, 3);
  if (in[0] != opt_.in_channels) {
    throw ShapeError(describe() + ": input has " + std::to_string(in[0]) + " channels");
  }
  const std::size_t h = conv_extent(in[1], opt_.kernel, opt_.stride, opt_.padding, opt_.dilation);
  const std::size_t w = conv_extent(in[2], opt_.kernel, opt_.stride, opt_.padding, opt_.dilation);
  if (h == 0 || w == 0) throw ShapeError(describe() + ": input " + shape_string(in) + " too small");
  return {opt_.out_channels, h, w};
}

std::vector<ParamSpec> Conv2d::param_specs() const {
  const std::size_t per_group = opt_.in_channels / opt_.groups;
  const std::size_t fan_in = per_group * opt_.kernel * opt_.kernel;
  std::vector<ParamSpec> specs{
      {"weight", {opt_.out_channels, per_group, opt_.kernel, opt_.kernel}, fan_in, false}};
  if (opt_.bias) specs.push_back({"bias", {opt_.out_channels}, fan_in, true});
  return specs;
}

void Conv2d::forward(const Tensor& in, Tensor& out, const double* params) const {
  const std::size_t batch = in.batch();
  const std::size_t H = in.dim(2), W = in.dim(3);
  const std::size_t Ho = out.dim(2), Wo = out.dim(3);
  const std::size_t k = opt_.kernel, s = opt_.stride, d = opt_.dilation;
  const auto p = static_cast<std::ptrdiff_t>(opt_.padding);
  const std::size_t in_per_group = opt_.in_channels / opt_.groups;
  const std::size_t out_per_group = opt_.out_channels / opt_.groups;
  const double* bias = opt_.bias ? params + opt_.out_channels * in_per_group * k * k : nullptr;

  out.fill(0.0);
  for (std::size_t n = 0; n < batch; ++n) {
    const double* x = in.sample(n).data();
    double* y = out.sample(n).data();
    for (std::size_t oc = 0; oc < opt_.out_channels; ++oc) {
      double* yc = y + oc * Ho * Wo;
      const std::size_t g = oc / out_per_group;
      for (std::size_t icg = 0; icg < in_per_group; ++icg) {
        const double* xc = x + (g * in_per_group + icg) * H * W;
        const double* wk = params + ((oc * in_per_group + icg) * k) * k;
        for (std::size_t kh = 0; kh < k; ++kh) {
          for (std::size_t kw = 0; kw < k; ++kw) {
            const double wv = wk[kh * k + kw];
            for (std::size_t oh = 0; oh < Ho; ++oh) {
              const std::ptrdiff_t ih = static_cast<std::ptrdiff_t>(oh * s + kh * d) - p;
              if (ih < 0 || ih >= static_cast<std::ptrdiff_t>(H)) continue;
              const double* xrow = xc + static_cast<std::size_t>(ih) * W;
              double* yrow = yc + oh * Wo;
              for (std::size_t ow = 0; ow < Wo; ++ow) {
                const std::ptrdiff_t iw = static_cast<std::ptrdiff_t>(ow * s + kw * d) - p;
                if (iw < 0 || iw >= static_cast<std::ptrdiff_t>(W)) continue;
                yrow[ow] += wv * xrow[iw];
              }
            }
          }
        }
      }
      if (bias) {
        for (std::size_t i = 0; i < Ho * Wo; ++i) yc[i] += bias[oc];
      }
    }
  }
}

void Conv2d::backward(const Tensor& in, const Tensor& out, const Tensor& grad_out, Tensor* grad_in,
                      const double* params, GradTarget grads) const {
  const std::size_t batch = in.batch();
  const std::size_t H = in.dim(2), W = in.dim(3);
  const std::size_t Ho = out.dim(2), Wo = out.dim(3);
  const std::size_t k = opt_.kernel, s = opt_.stride, d = opt_.dilation;
  const auto p = static_cast<std::ptrdiff_t>(opt_.padding);
  const std::size_t in_per_group = opt_.in_channels / opt_.groups;
  const std::size_t out_per_group = opt_.out_channels / opt_.groups;
  const std::size_t weight_count = opt_.out_channels * in_per_group * k * k;

  for (std::size_t n = 0; n < batch; ++n) {
    const double* x = in.sample(n).data();
    const double* gy = grad_out.sample(n).data();
    double* gx = grad_in ? grad_in->sample(n).data() : nullptr;
    double* gw = grads.row(n);
    for (std::size_t oc = 0; oc < opt_.out_channels; ++oc) {
      const double* gyc = gy + oc * Ho * Wo;
      const std::size_t g = oc / out_per_group;
      if (opt_.bias) {
        double acc = 0.0;
        for (std::size_t i = 0; i < Ho * Wo; ++i) acc += gyc[i];
        gw[weight_count + oc] += acc;
      }
      for (std::size_t icg = 0; icg < in_per_group; ++icg) {
        const std::size_t ic = g * in_per_group + icg;
        const double* xc = x + ic * H * W;
        double* gxc = gx ? gx + ic * H * W : nullptr;
        const std::size_t wbase = ((oc * in_per_group + icg) * k) * k;
        for (std::size_t kh = 0; kh < k; ++kh) {
          for (std::size_t kw = 0; kw < k; ++kw) {
            const double wv = params[wbase + kh * k + kw];
            double acc = 0.0;
            for (std::size_t oh = 0; oh < Ho; ++oh) {
              const std::ptrdiff_t ih = static_cast<std::ptrdiff_t>(oh * s + kh * d) - p;
              if (ih < 0 || ih >= static_cast<std::ptrdiff_t>(H)) continue;
              const std::size_t row = static_cast<std::size_t>(ih) * W;
              const double* gyrow = gyc + oh * Wo;
              for (std::size_t ow = 0; ow < Wo; ++ow) {
                const std::ptrdiff_t iw = static_cast<std::ptrdiff_t>(ow * s + kw * d) - p;
                if (iw < 0 || iw >= static_cast<std::ptrdiff_t>(W)) continue;
                acc += gyrow[ow] * xc[row + static_cast<std::size_t>(iw)];
                if (gxc) gxc[row + static_cast<std::size_t>(iw)] += wv * gyrow[ow];
              }
            }
            gw[wbase + kh * k + kw] += acc;
          }
        }
      }
    }
  }
}

// ---- Pool2d ------------------------------------------------------------------

Pool2d::Pool2d(PoolMode mode, std::size_t kernel, std::size_t stride, std::size_t padding)
    : mode_(mode), kernel_(kernel), stride_(stride), padding_(padding) {
  if (kernel_ == 0 || stride_ == 0) throw ConfigError("pool kernel and stride must be nonzero");
  if (2 * padding_ > kernel_) throw ConfigError("pool padding exceeds half the kernel");
}

std::string Pool2d::describe() const {
  std::ostringstream s;
  s << kind() << kernel_ << 'x' << kernel_ << "(s" << stride_ << ", p" << padding_ << ')';
  return s.str();
}

Shape Pool2d::output_shape(const Shape& in) const {
  require_rank(*this, in, 3);
  const std::size_t h = conv_extent(in[1], kernel_, stride_, padding_, 1);
  const std::size_t w = conv_extent(in[2], kernel_, stride_, padding_, 1);
  if (h == 0 || w == 0) throw ShapeError(describe() + ": input " + shape_string(in) + " too small");
  return {in[0], h, w};
}

void Pool2d::forward(const Tensor& in, Tensor& out, const double*) const {
  const std::size_t batch = in.batch(), C = in.dim(1), H = in.dim(2), W = in.dim(3);
  const std::size_t Ho = out.dim(2), Wo = out.dim(3);
  const auto p = static_cast<std::ptrdiff_t>(padding_);
  for (std::size_t n = 0; n < batch; ++n) {
    for (std::size_t c = 0; c < C; ++c) {
      const double* x = in.raw() + (n * C + c) * H * W;
      double* y = out.raw() + (n * C + c) * Ho * Wo;
      for (std::size_t oh = 0; oh < Ho; ++oh) {
        for (std::size_t ow = 0; ow < Wo; ++ow) {
          const std::ptrdiff_t h0 = static_cast<std::ptrdiff_t>(oh * stride_) - p;
          const std::ptrdiff_t w0 = static_cast<std::ptrdiff_t>(ow * stride_) - p;
          const std::ptrdiff_t h1 = std::min<std::ptrdiff_t>(h0 + static_cast<std::ptrdiff_t>(kernel_), static_cast<std::ptrdiff_t>(H));
          const std::ptrdiff_t w1 = std::min<std::ptrdiff_t>(w0 + static_cast<std::ptrdiff_t>(kernel_), static_cast<std::ptrdiff_t>(W));
          double acc = mode_ == PoolMode::Max ? -std::numeric_limits<double>::infinity() : 0.0;
          std::size_t count = 0;
          for (std::ptrdiff_t ih = std::max<std::ptrdiff_t>(h0, 0); ih < h1; ++ih) {
            for (std::ptrdiff_t iw = std::max<std::ptrdiff_t>(w0, 0); iw < w1; ++iw) {
              const double v = x[ih * static_cast<std::ptrdiff_t>(W) + iw];
              if (mode_ == PoolMode::Max) {
                acc = std::max(acc, v);
              } else {
                acc += v;
              }
              ++count;
            }
          }
          y[oh * Wo + ow] = mode_ == PoolMode::Max ? acc : acc / static_cast<double>(count);
        }
      }
    }
  }
}

void Pool2d::backward(const Tensor& in, const Tensor& out, const Tensor& grad_out, Tensor* grad_in,
                      const double*, GradTarget) const {
  if (!grad_in) return;
  const std::size_t batch = in.batch(), C = in.dim(1), H = in.dim(2), W = in.dim(3);
  const std::size_t Ho = out.dim(2), Wo = out.dim(3);
  const auto p = static_cast<std::ptrdiff_t>(padding_);
  for (std::size_t n = 0; n < batch; ++n) {
    for (std::size_t c = 0; c < C; ++c) {
      const std::size_t off = (n * C + c) * H * W;
      const double* x = in.raw() + off;
      double* gx = grad_in->raw() + off;
      const double* gy = grad_out.raw() + (n * C + c) * Ho * Wo;
      for (std::size_t oh = 0; oh < Ho; ++oh) {
        for (std::size_t ow = 0; ow < Wo; ++ow) {
          const std::ptrdiff_t h0 = static_cast<std::ptrdiff_t>(oh * stride_) - p;
          const std::ptrdiff_t w0 = static_cast<std::ptrdiff_t>(ow * stride_) - p;
          const std::ptrdiff_t h1 = std::min<std::ptrdiff_t>(h0 + static_cast<std::ptrdiff_t>(kernel_), static_cast<std::ptrdiff_t>(H));
          const std::ptrdiff_t w1 = std::min<std::ptrdiff_t>(w0 + static_cast<std::ptrdiff_t>(kernel_), static_cast<std::ptrdiff_t>(W));
          const double g = gy[oh * Wo + ow];
          if (mode_ == PoolMode::Max) {
            // Gradient goes to the first maximal element.
            std::ptrdiff_t best = -1;
            double best_v = -std::numeric_limits<double>::infinity();
            for (std::ptrdiff_t ih = std::max<std::ptrdiff_t>(h0, 0); ih < h1; ++ih) {
              for (std::ptrdiff_t iw = std::max<std::ptrdiff_t>(w0, 0); iw < w1; ++iw) {
                const std::ptrdiff_t idx = ih * static_cast<std::ptrdiff_t>(W) + iw;
                if (best < 0 || x[idx] > best_v) {
                  best = idx;
                  best_v = x[idx];
                }
              }
            }
            gx[best] += g;
          } else {
            const auto hs = std::max<std::ptrdiff_t>(h0, 0), ws = std::max<std::ptrdiff_t>(w0, 0);
            const double share = g / static_cast<double>((h1 - hs) * (w1 - ws));
            for (std::ptrdiff_t ih = hs; ih < h1; ++ih) {
              for (std::ptrdiff_t iw = ws; iw < w1; ++iw) {
                gx[ih * static_cast<std::ptrdiff_t>(W) + iw] += share;
              }
            }
          }
        }
      }
    }
  }
}

// ---- ChannelPad --------------------------------------------------------------

Shape ChannelPad::output_shape(const Shape& in) const {
  require_rank(*this, in, 3);
  if (in[0] > out_channels_) {
    throw ShapeError("channel_pad: cannot shrink " + std::to_string(in[0]) + " channels to " +
                     std::to_string(out_channels_));
  }
  return {out_channels_, in[1], in[2]};
}

void ChannelPad::forward(const Tensor& in, Tensor& out, const double*) const {
  out.fill(0.0);
  const std::size_t k_in = in.sample_size(), k_out = out.sample_size();
  for (std::size_t n = 0; n < in.batch(); ++n) {
    std::copy_n(in.raw() + n * k_in, k_in, out.raw() + n * k_out);
  }
}

void ChannelPad::backward(const Tensor& in, const Tensor& out, const Tensor& grad_out,
                          Tensor* grad_in, const double*, GradTarget) const {
  if (!grad_in) return;
  const std::size_t k_in = in.sample_size(), k_out = out.sample_size();
  for (std::size_t n = 0; n < in.batch(); ++n) {
    const double* g = grad_out.raw() + n * k_out;
    double* gi = grad_in->raw() + n * k_in;
    for (std::size_t i = 0; i < k_in; ++i) gi[i] += g[i];
  }
}

// ---- GlobalAvgPool -----------------------------------------------------------

Shape GlobalAvgPool::output_shape(const Shape& in) const {
  require_rank(*this, in, 3);
  return {in[0]};
}

void GlobalAvgPool::forward(const Tensor& in, Tensor& out, const double*) const {
  const std::size_t C = in.dim(1), hw = in.dim(2) * in.dim(3);
  for (std::size_t n = 0; n < in.batch(); ++n) {
    for (std::size_t c = 0; c < C; ++c) {
      const double* x = in.raw() + (n * C + c) * hw;
      double acc = 0.0;
      for (std::size_t i = 0; i < hw; ++i) acc += x[i];
      out.raw()[n * C + c] = acc / static_cast<double>(hw);
    }
  }
}

void GlobalAvgPool::backward(const Tensor& in, const Tensor&, const Tensor& grad_out,
                             Tensor* grad_in, const double*, GradTarget) const {
  if (!grad_in) return;
  const std::size_t C = in.dim(1), hw = in.dim(2) * in.dim(3);
  for (std::size_t n = 0; n < in.batch(); ++n) {
    for (std::size_t c = 0; c < C; ++c) {
      const double g = grad_out.raw()[n * C + c] / static_cast<double>(hw);
      double* gx = grad_in->raw() + (n * C + c) * hw;
      for (std::size_t i = 0; i < hw; ++i) gx[i] += g;
    }
  }
}

// ---- BatchNorm ---------------------------------------------------------------

namespace {

struct ChannelStats {
  std::vector<double> mean;
  std::vector<double> inv_std;
};

// Channels are dim 1 of the batched tensor; everything after it is spatial.
ChannelStats channel_stats(const Tensor& in, double eps) {
  const std::size_t batch = in.batch(), C = in.dim(1);
  const std::size_t inner = in.sample_size() / C;
  ChannelStats st{std::vector<double>(C, 0.0), std::vector<double>(C, 0.0)};
  const double count = static_cast<double>(batch * inner);
  for (std::size_t c = 0; c < C; ++c) {
    double sum = 0.0;
    for (std::size_t n = 0; n < batch; ++n) {
      const double* x = in.raw() + (n * C + c) * inner;
      for (std::size_t i = 0; i < inner; ++i) sum += x[i];
    }
    const double mean = sum / count;
    double var = 0.0;
    for (std::size_t n = 0; n < batch; ++n) {
      const double* x = in.raw() + (n * C + c) * inner;
      for (std::size_t i = 0; i < inner; ++i) var += (x[i] - mean) * (x[i] - mean);
    }
    st.mean[c] = mean;
    st.inv_std[c] = 1.0 / std::sqrt(var / count + eps);
  }
  return st;
}

}  // namespace

void BatchNorm::forward(const Tensor& in, Tensor& out, const double*) const {
  const auto st = channel_stats(in, eps_);
  const std::size_t C = in.dim(1), inner = in.sample_size() / C;
  for (std::size_t n = 0; n < in.batch(); ++n) {
    for (std::size_t c = 0; c < C; ++c) {
      const std::size_t off = (n * C + c) * inner;
      for (std::size_t i = 0; i < inner; ++i) {
        out.raw()[off + i] = (in.raw()[off + i] - st.mean[c]) * st.inv_std[c];
      }
    }
  }
}

void BatchNorm::backward(const Tensor& in, const Tensor&, const Tensor& grad_out, Tensor* grad_in,
                         const double*, GradTarget) const {
  if (!grad_in) return;
  const auto st = channel_stats(in, eps_);
  const std::size_t C = in.dim(1), inner = in.sample_size() / C;
  for (std::size_t n = 0; n < in.batch(); ++n) {
    for (std::size_t c = 0; c < C; ++c) {
      const std::size_t off = (n * C + c) * inner;
      for (std::size_t i = 0; i < inner; ++i) {
        grad_in->raw()[off + i] += grad_out.raw()[off + i] * st.inv_std[c];
      }
    }
  }
}

}  // namespace tenas::nn
