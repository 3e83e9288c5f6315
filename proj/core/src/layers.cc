/* Copyright 2026 The Hemi Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "hemi/layers.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>
#include <utility>

#include "hemi/error.h"

namespace hemi::nn {
namespace {

void fill_uniform(std::vector<double>& values, double limit,
                  std::mt19937_64& rng) {
  // 53 random bits per draw; much cheaper than generate_canonical on
  // 40M-weight layers.
  for (double& v : values) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    v = limit * (2.0 * u - 1.0);
  }
}

void require_rank(const Tensor& t, std::size_t rank, std::string_view who) {
  if (t.rank() != rank) {
    throw DimensionError(std::string(who) + " expects a rank-" +
                         std::to_string(rank) + " input, got shape " +
                         shape_string(t.shape()));
  }
}

void require_same_shape(const Tensor& upstream,
                        const std::vector<std::size_t>& expected,
                        std::string_view who) {
  if (upstream.shape() != expected) {
    throw DimensionError(std::string(who) + " backward expects upstream shape " +
                         shape_string(expected) + ", got " +
                         shape_string(upstream.shape()));
  }
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

ParamCount& ParamCount::operator+=(const ParamCount& other) {
  total += other.total;
  trainable += other.trainable;
  non_trainable += other.non_trainable;
  return *this;
}

std::vector<const Parameter*> Layer::parameters() const {
  auto mutable_params = const_cast<Layer*>(this)->parameters();
  return {mutable_params.begin(), mutable_params.end()};
}

ParamCount Layer::count() const {
  ParamCount c;
  for (const Parameter* p : parameters()) {
    c.total += p->value.size();
    (p->trainable ? c.trainable : c.non_trainable) += p->value.size();
  }
  return c;
}

double glorot_limit(std::size_t fan_in, std::size_t fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

// ---------------------------------------------------------------------------
// Dense

DenseLayer::DenseLayer(std::size_t in_features, std::size_t out_features,
                       bool use_bias, std::mt19937_64& rng)
    : in_(in_features), out_(out_features), use_bias_(use_bias) {
  if (in_ == 0 || out_ == 0) {
    throw ValidationError("dense layer needs non-zero feature counts");
  }
  weights_ = {"kernel", std::vector<double>(in_ * out_), {}, true};
  fill_uniform(weights_.value, glorot_limit(in_, out_), rng);
  if (use_bias_) bias_ = {"bias", std::vector<double>(out_, 0.0), {}, true};
}

DenseLayer::DenseLayer(std::size_t in_features, std::size_t out_features,
                       std::vector<double> weights,
                       std::optional<std::vector<double>> bias)
    : in_(in_features), out_(out_features), use_bias_(bias.has_value()) {
  if (weights.size() != in_ * out_) {
    throw DimensionError("dense weights must hold out_features x in_features "
                         "values");
  }
  weights_ = {"kernel", std::move(weights), {}, true};
  if (use_bias_) {
    if (bias->size() != out_) {
      throw DimensionError("dense bias must hold out_features values");
    }
    bias_ = {"bias", std::move(*bias), {}, true};
  }
}

Tensor DenseLayer::forward(const Tensor& input, Mode) {
  require_rank(input, 2, "dense");
  if (input.dim(1) != in_) {
    throw DimensionError("dense layer expects " + std::to_string(in_) +
                         " input features, got " +
                         std::to_string(input.dim(1)));
  }
  const std::size_t batch = input.rows();
  Tensor out = Tensor::matrix(batch, out_);
  const double* w = weights_.value.data();
  for (std::size_t n = 0; n < batch; ++n) {
    const double* x = input.data() + n * in_;
    double* y = out.data() + n * out_;
    for (std::size_t o = 0; o < out_; ++o) {
      const double* wo = w + o * in_;
      double acc = 0.0;
      for (std::size_t i = 0; i < in_; ++i) acc += wo[i] * x[i];
      y[o] = use_bias_ ? acc + bias_.value[o] : acc;
    }
  }
  cached_input_ = input;
  return out;
}

Tensor DenseLayer::backward(const Tensor& upstream) {
  if (!cached_input_) throw StateError("dense backward called before forward");
  const Tensor& x = *cached_input_;
  const std::size_t batch = x.rows();
  require_same_shape(upstream, {batch, out_}, "dense");

  Tensor input_grad = Tensor::matrix(batch, in_);
  weights_.grad.assign(in_ * out_, 0.0);
  if (use_bias_) bias_.grad.assign(out_, 0.0);

  const double* w = weights_.value.data();
  double* dw = weights_.grad.data();
  for (std::size_t n = 0; n < batch; ++n) {
    const double* dy = upstream.data() + n * out_;
    const double* xn = x.data() + n * in_;
    double* dx = input_grad.data() + n * in_;
    for (std::size_t o = 0; o < out_; ++o) {
      const double g = dy[o];
      if (g == 0.0) continue;
      const double* wo = w + o * in_;
      double* dwo = dw + o * in_;
      for (std::size_t i = 0; i < in_; ++i) {
        dx[i] += g * wo[i];
        dwo[i] += g * xn[i];
      }
    }
    if (use_bias_) {
      for (std::size_t o = 0; o < out_; ++o) bias_.grad[o] += dy[o];
    }
  }
  return input_grad;
}

std::vector<std::size_t> DenseLayer::output_shape(
    const std::vector<std::size_t>& input_shape) const {
  if (input_shape.size() != 1 || input_shape[0] != in_) {
    throw DimensionError("dense layer expects input shape (" +
                         std::to_string(in_) + "), got " +
                         shape_string(input_shape));
  }
  return {out_};
}

std::unique_ptr<Layer> DenseLayer::clone() const {
  auto copy = std::make_unique<DenseLayer>(*this);
  copy->cached_input_.reset();
  return copy;
}

std::vector<Parameter*> DenseLayer::parameters() {
  if (use_bias_) return {&weights_, &bias_};
  return {&weights_};
}

// ---------------------------------------------------------------------------
// BatchNorm

BatchNormLayer::BatchNormLayer(std::size_t features, double epsilon,
                               double momentum)
    : features_(features), epsilon_(epsilon), momentum_(momentum) {
  if (features_ == 0) throw ValidationError("batch norm needs features > 0");
  if (!(epsilon_ > 0.0)) throw ValidationError("batch norm epsilon must be > 0");
  if (!(momentum_ > 0.0 && momentum_ < 1.0)) {
    throw ValidationError("batch norm momentum must lie in (0, 1)");
  }
  gamma_ = {"gamma", std::vector<double>(features_, 1.0), {}, true};
  beta_ = {"beta", std::vector<double>(features_, 0.0), {}, true};
  running_mean_ = {"moving_mean", std::vector<double>(features_, 0.0), {},
                   false};
  running_var_ = {"moving_variance", std::vector<double>(features_, 1.0), {},
                  false};
}

Tensor BatchNormLayer::forward(const Tensor& input, Mode mode) {
  require_rank(input, 2, "batch norm");
  if (input.dim(1) != features_) {
    throw DimensionError("batch norm expects " + std::to_string(features_) +
                         " features, got " + std::to_string(input.dim(1)));
  }
  const std::size_t batch = input.rows();
  const std::size_t d = features_;
  Tensor out = Tensor::matrix(batch, d);

  if (mode == Mode::kInference) {
    for (std::size_t j = 0; j < d; ++j) {
      const double inv = 1.0 / std::sqrt(running_var_.value[j] + epsilon_);
      for (std::size_t n = 0; n < batch; ++n) {
        const double xhat = (input.at(n, j) - running_mean_.value[j]) * inv;
        out.at(n, j) = gamma_.value[j] * xhat + beta_.value[j];
      }
    }
    cache_ = Cache{Tensor{}, {}, false};
    return out;
  }

  if (batch < 2) {
    throw ValidationError(
        "degenerate batch: batch norm in training mode needs at least 2 rows");
  }
  Cache cache{Tensor::matrix(batch, d), std::vector<double>(d), true};
  std::vector<double> mean(d, 0.0), var(d, 0.0);
  for (std::size_t n = 0; n < batch; ++n) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += input.at(n, j);
  }
  for (double& m : mean) m /= static_cast<double>(batch);
  for (std::size_t n = 0; n < batch; ++n) {
    for (std::size_t j = 0; j < d; ++j) {
      const double c = input.at(n, j) - mean[j];
      var[j] += c * c;
    }
  }
  for (double& v : var) v /= static_cast<double>(batch);

  for (std::size_t j = 0; j < d; ++j) {
    cache.inv_std[j] = 1.0 / std::sqrt(var[j] + epsilon_);
  }
  for (std::size_t n = 0; n < batch; ++n) {
    for (std::size_t j = 0; j < d; ++j) {
      const double xhat = (input.at(n, j) - mean[j]) * cache.inv_std[j];
      cache.normalized.at(n, j) = xhat;
      out.at(n, j) = gamma_.value[j] * xhat + beta_.value[j];
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    running_mean_.value[j] =
        (1.0 - momentum_) * running_mean_.value[j] + momentum_ * mean[j];
    running_var_.value[j] =
        (1.0 - momentum_) * running_var_.value[j] + momentum_ * var[j];
  }
  cache_ = std::move(cache);
  return out;
}

Tensor BatchNormLayer::backward(const Tensor& upstream) {
  if (!cache_) throw StateError("batch norm backward called before forward");
  if (!cache_->training) {
    throw StateError("batch norm backward needs a training-mode forward");
  }
  const Tensor& xhat = cache_->normalized;
  const std::size_t batch = xhat.rows();
  const std::size_t d = features_;
  require_same_shape(upstream, {batch, d}, "batch norm");

  gamma_.grad.assign(d, 0.0);
  beta_.grad.assign(d, 0.0);
  std::vector<double> sum_dxhat(d, 0.0), sum_dxhat_xhat(d, 0.0);
  for (std::size_t n = 0; n < batch; ++n) {
    for (std::size_t j = 0; j < d; ++j) {
      const double dy = upstream.at(n, j);
      gamma_.grad[j] += dy * xhat.at(n, j);
      beta_.grad[j] += dy;
      const double dxhat = dy * gamma_.value[j];
      sum_dxhat[j] += dxhat;
      sum_dxhat_xhat[j] += dxhat * xhat.at(n, j);
    }
  }
  const double nb = static_cast<double>(batch);
  Tensor input_grad = Tensor::matrix(batch, d);
  for (std::size_t n = 0; n < batch; ++n) {
    for (std::size_t j = 0; j < d; ++j) {
      const double dxhat = upstream.at(n, j) * gamma_.value[j];
      input_grad.at(n, j) =
          cache_->inv_std[j] / nb *
          (nb * dxhat - sum_dxhat[j] - xhat.at(n, j) * sum_dxhat_xhat[j]);
    }
  }
  return input_grad;
}

std::vector<std::size_t> BatchNormLayer::output_shape(
    const std::vector<std::size_t>& input_shape) const {
  if (input_shape.size() != 1 || input_shape[0] != features_) {
    throw DimensionError("batch norm expects input shape (" +
                         std::to_string(features_) + "), got " +
                         shape_string(input_shape));
  }
  return input_shape;
}

std::unique_ptr<Layer> BatchNormLayer::clone() const {
  auto copy = std::make_unique<BatchNormLayer>(*this);
  copy->cache_.reset();
  return copy;
}

std::vector<Parameter*> BatchNormLayer::parameters() {
  return {&gamma_, &beta_, &running_mean_, &running_var_};
}

// ---------------------------------------------------------------------------
// Conv1D

Conv1DLayer::Conv1DLayer(std::size_t in_channels, std::size_t out_channels,
                         std::size_t kernel_size, std::size_t stride,
                         std::size_t padding, std::mt19937_64& rng)
    : in_channels_(in_channels),
      out_channels_(out_channels),
      kernel_size_(kernel_size),
      stride_(stride),
      padding_(padding) {
  if (in_channels_ == 0 || out_channels_ == 0 || kernel_size_ == 0 ||
      stride_ == 0) {
    throw ValidationError("conv1d needs non-zero channels, kernel and stride");
  }
  kernels_ = {"kernel",
              std::vector<double>(out_channels_ * in_channels_ * kernel_size_),
              {},
              true};
  fill_uniform(kernels_.value,
               glorot_limit(in_channels_ * kernel_size_,
                            out_channels_ * kernel_size_),
               rng);
  bias_ = {"bias", std::vector<double>(out_channels_, 0.0), {}, true};
}

Conv1DLayer::Conv1DLayer(std::size_t in_channels, std::size_t out_channels,
                         std::size_t kernel_size, std::size_t stride,
                         std::size_t padding, std::vector<double> kernels,
                         std::vector<double> bias)
    : in_channels_(in_channels),
      out_channels_(out_channels),
      kernel_size_(kernel_size),
      stride_(stride),
      padding_(padding) {
  if (kernel_size_ == 0 || stride_ == 0) {
    throw ValidationError("conv1d needs non-zero kernel and stride");
  }
  if (kernels.size() != out_channels_ * in_channels_ * kernel_size_ ||
      bias.size() != out_channels_) {
    throw DimensionError("conv1d kernel/bias sizes do not match channels");
  }
  kernels_ = {"kernel", std::move(kernels), {}, true};
  bias_ = {"bias", std::move(bias), {}, true};
}

std::size_t Conv1DLayer::output_length(std::size_t input_length) const {
  const std::size_t padded = input_length + 2 * padding_;
  if (padded < kernel_size_) {
    throw DimensionError("conv1d kernel of size " +
                         std::to_string(kernel_size_) +
                         " is larger than the padded input length " +
                         std::to_string(padded));
  }
  return (padded - kernel_size_) / stride_ + 1;
}

namespace {

// Output positions t with 0 <= t*stride + k - padding < length.
struct TapRange {
  std::size_t begin = 0;
  std::size_t end = 0;
};

TapRange tap_range(std::size_t k, std::size_t stride, std::size_t padding,
                   std::size_t length, std::size_t out_length) {
  TapRange r;
  if (k < padding) r.begin = (padding - k + stride - 1) / stride;
  if (length + padding <= k) return {0, 0};
  const std::size_t last = (length - 1 + padding - k) / stride;
  r.end = std::min(out_length, last + 1);
  if (r.begin > r.end) r.begin = r.end;
  return r;
}

// Unit-stride kernels on a zero-padded copy of each input row. Outputs are
// computed in tiles of kRows channels by kCols positions held in local
// accumulators, so each input load feeds kRows multiply-adds. Per output the
// sum still runs bias, then channels, then taps in order.
constexpr std::size_t kRows = 4;
constexpr std::size_t kCols = 8;

// rows x (length + 2 * pad) copy of `src` with `pad` zeros on both sides.
std::vector<double> pad_rows(const double* src, std::size_t rows,
                             std::size_t length, std::size_t pad) {
  const std::size_t width = length + 2 * pad;
  std::vector<double> out(rows * width, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy(src + r * length, src + (r + 1) * length, out.data() + r * width + pad);
  }
  return out;
}

// y[o][t] = init[o] + sum_i sum_k w(o, i, k) * x[i][t + k] for one example.
// w(o, i, k) = w[o * w_o + i * w_i + k * w_k]; x rows have stride x_width.
template <typename WeightAt>
void tiled_correlation(const double* x, std::size_t x_width, std::size_t inputs,
                       std::size_t outputs, std::size_t taps, std::size_t out_len,
                       const WeightAt& weight, const double* init, double* y) {
  for (std::size_t o0 = 0; o0 < outputs; o0 += kRows) {
    const std::size_t rows = std::min(kRows, outputs - o0);
    for (std::size_t t0 = 0; t0 < out_len; t0 += kCols) {
      const std::size_t cols = std::min(kCols, out_len - t0);
      double acc[kRows][kCols];
      for (std::size_t r = 0; r < kRows; ++r) {
        const double b = r < rows && init ? init[o0 + r] : 0.0;
        for (std::size_t c = 0; c < kCols; ++c) acc[r][c] = b;
      }
      if (rows == kRows && cols == kCols) {
        for (std::size_t i = 0; i < inputs; ++i) {
          for (std::size_t k = 0; k < taps; ++k) {
            const double* xs = x + i * x_width + t0 + k;
            const double w0 = weight(o0, i, k), w1 = weight(o0 + 1, i, k);
            const double w2 = weight(o0 + 2, i, k), w3 = weight(o0 + 3, i, k);
            for (std::size_t c = 0; c < kCols; ++c) {
              const double v = xs[c];
              acc[0][c] += w0 * v;
              acc[1][c] += w1 * v;
              acc[2][c] += w2 * v;
              acc[3][c] += w3 * v;
            }
          }
        }
      } else {
        for (std::size_t i = 0; i < inputs; ++i) {
          for (std::size_t k = 0; k < taps; ++k) {
            const double* xs = x + i * x_width + t0 + k;
            for (std::size_t r = 0; r < rows; ++r) {
              const double w = weight(o0 + r, i, k);
              for (std::size_t c = 0; c < cols; ++c) acc[r][c] += w * xs[c];
            }
          }
        }
      }
      for (std::size_t r = 0; r < rows; ++r) {
        std::copy(acc[r], acc[r] + cols, y + (o0 + r) * out_len + t0);
      }
    }
  }
}

}  // namespace

Tensor Conv1DLayer::forward(const Tensor& input, Mode) {
  require_rank(input, 3, "conv1d");
  if (input.dim(1) != in_channels_) {
    throw DimensionError("conv1d expects " + std::to_string(in_channels_) +
                         " input channels, got " +
                         std::to_string(input.dim(1)));
  }
  const std::size_t batch = input.dim(0);
  const std::size_t length = input.dim(2);
  const std::size_t out_length = output_length(length);
  Tensor out = Tensor::sequence(batch, out_channels_, out_length);
  const std::size_t k_size = kernel_size_;

  if (stride_ == 1) {
    const std::size_t width = length + 2 * padding_;
    const std::size_t w_o = in_channels_ * k_size;
    const double* w = kernels_.value.data();
    auto weight = [&](std::size_t o, std::size_t i, std::size_t k) {
      return w[o * w_o + i * k_size + k];
    };
    for (std::size_t n = 0; n < batch; ++n) {
      const auto xp = pad_rows(input.data() + n * in_channels_ * length,
                               in_channels_, length, padding_);
      tiled_correlation(xp.data(), width, in_channels_, out_channels_, k_size,
                        out_length, weight, bias_.value.data(),
                        out.data() + n * out_channels_ * out_length);
    }
    cached_input_ = input;
    return out;
  }

  for (std::size_t n = 0; n < batch; ++n) {
    for (std::size_t oc = 0; oc < out_channels_; ++oc) {
      double* y = out.data() + (n * out_channels_ + oc) * out_length;
      std::fill(y, y + out_length, bias_.value[oc]);
      for (std::size_t ic = 0; ic < in_channels_; ++ic) {
        const double* x = input.data() + (n * in_channels_ + ic) * length;
        const double* w =
            kernels_.value.data() + (oc * in_channels_ + ic) * k_size;
        for (std::size_t k = 0; k < k_size; ++k) {
          const TapRange r = tap_range(k, stride_, padding_, length, out_length);
          const double wk = w[k];
          if (stride_ == 1) {
            for (std::size_t t = r.begin; t < r.end; ++t) {
              y[t] += wk * x[t + k - padding_];
            }
          } else {
            for (std::size_t t = r.begin; t < r.end; ++t) {
              y[t] += wk * x[t * stride_ + k - padding_];
            }
          }
        }
      }
    }
  }
  cached_input_ = input;
  return out;
}

Tensor Conv1DLayer::backward(const Tensor& upstream) {
  if (!cached_input_) throw StateError("conv1d backward called before forward");
  const Tensor& input = *cached_input_;
  const std::size_t batch = input.dim(0);
  const std::size_t length = input.dim(2);
  const std::size_t out_length = output_length(length);
  require_same_shape(upstream, {batch, out_channels_, out_length}, "conv1d");

  Tensor input_grad = Tensor::sequence(batch, in_channels_, length);
  kernels_.grad.assign(kernels_.value.size(), 0.0);
  bias_.grad.assign(out_channels_, 0.0);
  const std::size_t k_size = kernel_size_;

  if (stride_ == 1) {
    // Input gradient: a full correlation of the padded upstream with the
    // flipped kernels, swapping the roles of input and output channels.
    const std::size_t width = length + 2 * padding_;
    const std::size_t dy_pad = k_size - 1;
    const std::size_t dy_width = out_length + 2 * dy_pad;
    const double* w = kernels_.value.data();
    auto flipped = [&](std::size_t i, std::size_t o, std::size_t k) {
      return w[(o * in_channels_ + i) * k_size + (k_size - 1 - k)];
    };
    std::vector<double> dxp(in_channels_ * width);
    for (std::size_t n = 0; n < batch; ++n) {
      const double* dy = upstream.data() + n * out_channels_ * out_length;
      const auto dyp = pad_rows(dy, out_channels_, out_length, dy_pad);
      tiled_correlation(dyp.data(), dy_width, out_channels_, in_channels_, k_size,
                        width, flipped, nullptr, dxp.data());
      double* dx = input_grad.data() + n * in_channels_ * length;
      for (std::size_t ic = 0; ic < in_channels_; ++ic) {
        std::copy_n(dxp.data() + ic * width + padding_, length, dx + ic * length);
      }

      const auto xp = pad_rows(input.data() + n * in_channels_ * length,
                               in_channels_, length, padding_);
      for (std::size_t oc = 0; oc < out_channels_; ++oc) {
        const double* g = dy + oc * out_length;
        double bsum = 0.0;
        for (std::size_t t = 0; t < out_length; ++t) bsum += g[t];
        bias_.grad[oc] += bsum;
        double* dw = kernels_.grad.data() + oc * in_channels_ * k_size;
        for (std::size_t ic = 0; ic < in_channels_; ++ic) {
          const double* x = xp.data() + ic * width;
          for (std::size_t k = 0; k < k_size; ++k) {
            double acc[4] = {0.0, 0.0, 0.0, 0.0};
            std::size_t t = 0;
            for (; t + 4 <= out_length; t += 4) {
              acc[0] += g[t] * x[t + k];
              acc[1] += g[t + 1] * x[t + 1 + k];
              acc[2] += g[t + 2] * x[t + 2 + k];
              acc[3] += g[t + 3] * x[t + 3 + k];
            }
            for (; t < out_length; ++t) acc[0] += g[t] * x[t + k];
            dw[ic * k_size + k] += (acc[0] + acc[1]) + (acc[2] + acc[3]);
          }
        }
      }
    }
    return input_grad;
  }

  for (std::size_t n = 0; n < batch; ++n) {
    for (std::size_t oc = 0; oc < out_channels_; ++oc) {
      const double* dy = upstream.data() + (n * out_channels_ + oc) * out_length;
      double bsum = 0.0;
      for (std::size_t t = 0; t < out_length; ++t) bsum += dy[t];
      bias_.grad[oc] += bsum;
      for (std::size_t ic = 0; ic < in_channels_; ++ic) {
        const double* x = input.data() + (n * in_channels_ + ic) * length;
        double* dx = input_grad.data() + (n * in_channels_ + ic) * length;
        const std::size_t w_off = (oc * in_channels_ + ic) * k_size;
        const double* w = kernels_.value.data() + w_off;
        double* dw = kernels_.grad.data() + w_off;
        for (std::size_t k = 0; k < k_size; ++k) {
          const TapRange r = tap_range(k, stride_, padding_, length, out_length);
          const double wk = w[k];
          if (stride_ == 1) {
            const std::size_t shift = k - padding_;  // wraps; t + shift is in range
            for (std::size_t t = r.begin; t < r.end; ++t) dx[t + shift] += wk * dy[t];
            double acc[4] = {0.0, 0.0, 0.0, 0.0};
            std::size_t t = r.begin;
            for (; t + 4 <= r.end; t += 4) {
              acc[0] += dy[t] * x[t + shift];
              acc[1] += dy[t + 1] * x[t + 1 + shift];
              acc[2] += dy[t + 2] * x[t + 2 + shift];
              acc[3] += dy[t + 3] * x[t + 3 + shift];
            }
            for (; t < r.end; ++t) acc[0] += dy[t] * x[t + shift];
            dw[k] += (acc[0] + acc[1]) + (acc[2] + acc[3]);
            continue;
          }
          double acc = 0.0;
          for (std::size_t t = r.begin; t < r.end; ++t) {
            const std::size_t pos = t * stride_ + k - padding_;
            dx[pos] += wk * dy[t];
            acc += dy[t] * x[pos];
          }
          dw[k] += acc;
        }
      }
    }
  }
  return input_grad;
}

std::vector<std::size_t> Conv1DLayer::output_shape(
    const std::vector<std::size_t>& input_shape) const {
  if (input_shape.size() != 2 || input_shape[0] != in_channels_) {
    throw DimensionError("conv1d expects input shape (" +
                         std::to_string(in_channels_) + ", L), got " +
                         shape_string(input_shape));
  }
  return {out_channels_, output_length(input_shape[1])};
}

std::unique_ptr<Layer> Conv1DLayer::clone() const {
  auto copy = std::make_unique<Conv1DLayer>(*this);
  copy->cached_input_.reset();
  return copy;
}

std::vector<Parameter*> Conv1DLayer::parameters() {
  return {&kernels_, &bias_};
}

// ---------------------------------------------------------------------------
// MaxPool1D

MaxPool1DLayer::MaxPool1DLayer(std::size_t kernel_size, std::size_t stride)
    : kernel_size_(kernel_size), stride_(stride) {
  if (kernel_size_ == 0 || stride_ == 0) {
    throw ValidationError("max pool needs non-zero kernel and stride");
  }
}

std::size_t MaxPool1DLayer::output_length(std::size_t input_length) const {
  if (input_length < kernel_size_) {
    throw DimensionError("max pool kernel of size " +
                         std::to_string(kernel_size_) +
                         " exceeds input length " +
                         std::to_string(input_length));
  }
  return (input_length - kernel_size_) / stride_ + 1;
}

Tensor MaxPool1DLayer::forward(const Tensor& input, Mode) {
  require_rank(input, 3, "max pool");
  const std::size_t batch = input.dim(0);
  const std::size_t channels = input.dim(1);
  const std::size_t length = input.dim(2);
  const std::size_t out_length = output_length(length);
  Tensor out = Tensor::sequence(batch, channels, out_length);
  argmax_.assign(out.size(), 0);
  for (std::size_t row = 0; row < batch * channels; ++row) {
    const double* x = input.data() + row * length;
    for (std::size_t t = 0; t < out_length; ++t) {
      const std::size_t start = t * stride_;
      std::size_t best = start;
      for (std::size_t i = start + 1; i < start + kernel_size_; ++i) {
        if (x[i] > x[best]) best = i;
      }
      out[row * out_length + t] = x[best];
      argmax_[row * out_length + t] = row * length + best;
    }
  }
  input_shape_ = input.shape();
  cached_ = true;
  return out;
}

Tensor MaxPool1DLayer::backward(const Tensor& upstream) {
  if (!cached_) throw StateError("max pool backward called before forward");
  const std::vector<std::size_t> expected = {
      input_shape_[0], input_shape_[1], output_length(input_shape_[2])};
  require_same_shape(upstream, expected, "max pool");
  Tensor input_grad(input_shape_);
  for (std::size_t i = 0; i < upstream.size(); ++i) {
    input_grad[argmax_[i]] += upstream[i];
  }
  return input_grad;
}

std::vector<std::size_t> MaxPool1DLayer::output_shape(
    const std::vector<std::size_t>& input_shape) const {
  if (input_shape.size() != 2) {
    throw DimensionError("max pool expects (channels, length), got " +
                         shape_string(input_shape));
  }
  return {input_shape[0], output_length(input_shape[1])};
}

std::unique_ptr<Layer> MaxPool1DLayer::clone() const {
  auto copy = std::make_unique<MaxPool1DLayer>(kernel_size_, stride_);
  return copy;
}

// ---------------------------------------------------------------------------
// Activations

std::string_view activation_name(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::kReLU: return "relu";
    case ActivationKind::kLeakyReLU: return "leaky_relu";
    case ActivationKind::kSigmoid: return "sigmoid";
    case ActivationKind::kTanh: return "tanh";
  }
  return "unknown";
}

Activation parse_activation(std::string_view name, double slope) {
  const std::string n = lower(name);
  if (n == "relu") return Activation::relu();
  if (n == "leaky_relu" || n == "leakyrelu") {
    if (!(slope > 0.0 && slope < 1.0)) {
      throw ValidationError("leaky relu slope must lie in (0, 1)");
    }
    return Activation::leaky_relu(slope);
  }
  if (n == "sigmoid") return Activation::sigmoid();
  if (n == "tanh") return Activation::tanh();
  throw ValidationError("unknown activation '" + std::string(name) + "'");
}

double activation_apply(const Activation& act, double x) {
  switch (act.kind) {
    case ActivationKind::kReLU: return x < 0.0 ? 0.0 : x;  // NaN passes through
    case ActivationKind::kLeakyReLU: return x < 0.0 ? act.slope * x : x;
    case ActivationKind::kSigmoid:
      if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
      else {
        const double e = std::exp(x);
        return e / (1.0 + e);
      }
    case ActivationKind::kTanh: return std::tanh(x);
  }
  return x;
}

double activation_derivative(const Activation& act, double x) {
  switch (act.kind) {
    case ActivationKind::kReLU: return x >= 0.0 ? 1.0 : 0.0;
    case ActivationKind::kLeakyReLU: return x >= 0.0 ? 1.0 : act.slope;
    case ActivationKind::kSigmoid: {
      const double s = activation_apply(act, x);
      return s * (1.0 - s);
    }
    case ActivationKind::kTanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
  }
  return 1.0;
}

ActivationLayer::ActivationLayer(Activation act) : act_(act) {
  if (act_.kind == ActivationKind::kLeakyReLU &&
      !(act_.slope > 0.0 && act_.slope < 1.0)) {
    throw ValidationError("leaky relu slope must lie in (0, 1)");
  }
}

std::string_view ActivationLayer::type_name() const {
  switch (act_.kind) {
    case ActivationKind::kReLU: return "ReLU";
    case ActivationKind::kLeakyReLU: return "LeakyReLU";
    case ActivationKind::kSigmoid: return "Sigmoid";
    case ActivationKind::kTanh: return "Tanh";
  }
  return "Activation";
}

Tensor ActivationLayer::forward(const Tensor& input, Mode) {
  Tensor out = input;
  for (double& v : out.values()) v = activation_apply(act_, v);
  cached_input_ = input;
  return out;
}

Tensor ActivationLayer::backward(const Tensor& upstream) {
  if (!cached_input_) {
    throw StateError("activation backward called before forward");
  }
  require_same_shape(upstream, cached_input_->shape(), "activation");
  Tensor grad = upstream;
  const auto x = cached_input_->values();
  auto g = grad.values();
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] *= activation_derivative(act_, x[i]);
  }
  return grad;
}

std::vector<std::size_t> ActivationLayer::output_shape(
    const std::vector<std::size_t>& input_shape) const {
  return input_shape;
}

std::unique_ptr<Layer> ActivationLayer::clone() const {
  return std::make_unique<ActivationLayer>(act_);
}

// ---------------------------------------------------------------------------
// Flatten

Tensor FlattenLayer::forward(const Tensor& input, Mode) {
  if (input.rank() < 2) {
    throw DimensionError("flatten expects a batched input, got shape " +
                         shape_string(input.shape()));
  }
  input_shape_ = input.shape();
  return input.reshaped({input.rows(), input.row_size()});
}

Tensor FlattenLayer::backward(const Tensor& upstream) {
  if (input_shape_.empty()) {
    throw StateError("flatten backward called before forward");
  }
  return upstream.reshaped(input_shape_);
}

std::vector<std::size_t> FlattenLayer::output_shape(
    const std::vector<std::size_t>& input_shape) const {
  std::size_t n = 1;
  for (std::size_t d : input_shape) n *= d;
  return {n};
}

std::unique_ptr<Layer> FlattenLayer::clone() const {
  return std::make_unique<FlattenLayer>();
}

}  // namespace hemi::nn
