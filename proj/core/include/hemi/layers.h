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

#ifndef HEMI_LAYERS_H_
#define HEMI_LAYERS_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "hemi/tensor.h"

namespace hemi::nn {

enum class Mode { kTraining, kInference };

// A named parameter buffer owned by a layer. Trainable parameters carry a
// gradient buffer of the same length, filled by the layer's backward pass.
// Non-trainable ones (batch-norm running statistics) have an empty grad.
struct Parameter {
  std::string name;
  std::vector<double> value;
  std::vector<double> grad;
  bool trainable = true;
};

struct ParamCount {
  std::size_t total = 0;
  std::size_t trainable = 0;
  std::size_t non_trainable = 0;

  ParamCount& operator+=(const ParamCount& other);
  bool operator==(const ParamCount&) const = default;
};

// Forward/backward contract shared by all layers. Shapes passed to
// output_shape exclude the batch axis.
//
// forward caches whatever backward needs; backward without a preceding
// training-compatible forward throws StateError. backward overwrites (does
// not accumulate) parameter gradients.
class Layer {
 public:
  virtual ~Layer() = default;

  virtual std::string_view type_name() const = 0;
  virtual Tensor forward(const Tensor& input, Mode mode) = 0;
  virtual Tensor backward(const Tensor& upstream) = 0;
  virtual std::vector<std::size_t> output_shape(
      const std::vector<std::size_t>& input_shape) const = 0;
  virtual std::unique_ptr<Layer> clone() const = 0;

  virtual std::vector<Parameter*> parameters() { return {}; }
  std::vector<const Parameter*> parameters() const;
  ParamCount count() const;
};

// Glorot-uniform bound sqrt(6 / (fan_in + fan_out)).
double glorot_limit(std::size_t fan_in, std::size_t fan_out);

class DenseLayer final : public Layer {
 public:
  DenseLayer(std::size_t in_features, std::size_t out_features, bool use_bias,
             std::mt19937_64& rng);
  // weights: out_features x in_features row-major.
  DenseLayer(std::size_t in_features, std::size_t out_features,
             std::vector<double> weights, std::optional<std::vector<double>> bias);

  std::string_view type_name() const override { return "Dense"; }
  Tensor forward(const Tensor& input, Mode mode) override;
  Tensor backward(const Tensor& upstream) override;
  std::vector<std::size_t> output_shape(
      const std::vector<std::size_t>& input_shape) const override;
  std::unique_ptr<Layer> clone() const override;
  std::vector<Parameter*> parameters() override;

  std::size_t in_features() const { return in_; }
  std::size_t out_features() const { return out_; }
  bool use_bias() const { return use_bias_; }
  Parameter& weights() { return weights_; }
  Parameter& bias() { return bias_; }
  const Parameter& weights() const { return weights_; }
  const Parameter& bias() const { return bias_; }

 private:
  std::size_t in_;
  std::size_t out_;
  bool use_bias_;
  Parameter weights_;
  Parameter bias_;
  std::optional<Tensor> cached_input_;
};

// Per-feature batch normalisation over a (batch x features) input.
//   training:  y = gamma * (x - mean_B) / sqrt(var_B + eps) + beta
//   inference: same with running statistics.
// var_B is the population (biased) batch variance. Running statistics are
// updated as running = (1 - momentum) * running + momentum * batch_stat.
class BatchNormLayer final : public Layer {
 public:
  static constexpr double kDefaultEpsilon = 1e-5;
  static constexpr double kDefaultMomentum = 0.1;

  explicit BatchNormLayer(std::size_t features,
                          double epsilon = kDefaultEpsilon,
                          double momentum = kDefaultMomentum);

  std::string_view type_name() const override { return "BatchNormalization"; }
  Tensor forward(const Tensor& input, Mode mode) override;
  Tensor backward(const Tensor& upstream) override;
  std::vector<std::size_t> output_shape(
      const std::vector<std::size_t>& input_shape) const override;
  std::unique_ptr<Layer> clone() const override;
  std::vector<Parameter*> parameters() override;

  std::size_t features() const { return features_; }
  double epsilon() const { return epsilon_; }
  double momentum() const { return momentum_; }
  Parameter& gamma() { return gamma_; }
  Parameter& beta() { return beta_; }
  const Parameter& running_mean() const { return running_mean_; }
  const Parameter& running_var() const { return running_var_; }

 private:
  struct Cache {
    Tensor normalized;
    std::vector<double> inv_std;
    bool training = false;
  };

  std::size_t features_;
  double epsilon_;
  double momentum_;
  Parameter gamma_;
  Parameter beta_;
  Parameter running_mean_;
  Parameter running_var_;
  std::optional<Cache> cache_;
};

// 1-D cross-correlation over (batch x channels x length) input with zero
// padding on both ends. Each output element accumulates the bias first, then
// input channels in order and kernel taps in order within a channel.
class Conv1DLayer final : public Layer {
 public:
  Conv1DLayer(std::size_t in_channels, std::size_t out_channels,
              std::size_t kernel_size, std::size_t stride, std::size_t padding,
              std::mt19937_64& rng);
  // kernels: out_channels x in_channels x kernel_size row-major.
  Conv1DLayer(std::size_t in_channels, std::size_t out_channels,
              std::size_t kernel_size, std::size_t stride, std::size_t padding,
              std::vector<double> kernels, std::vector<double> bias);

  std::string_view type_name() const override { return "Conv1D"; }
  Tensor forward(const Tensor& input, Mode mode) override;
  Tensor backward(const Tensor& upstream) override;
  std::vector<std::size_t> output_shape(
      const std::vector<std::size_t>& input_shape) const override;
  std::unique_ptr<Layer> clone() const override;
  std::vector<Parameter*> parameters() override;

  std::size_t output_length(std::size_t input_length) const;
  std::size_t in_channels() const { return in_channels_; }
  std::size_t out_channels() const { return out_channels_; }
  std::size_t kernel_size() const { return kernel_size_; }
  std::size_t stride() const { return stride_; }
  std::size_t padding() const { return padding_; }
  Parameter& kernels() { return kernels_; }
  Parameter& bias() { return bias_; }

 private:
  std::size_t in_channels_;
  std::size_t out_channels_;
  std::size_t kernel_size_;
  std::size_t stride_;
  std::size_t padding_;
  Parameter kernels_;
  Parameter bias_;
  std::optional<Tensor> cached_input_;
};

// Window maxima over each channel. backward routes each upstream value to the
// first index attaining the window maximum.
class MaxPool1DLayer final : public Layer {
 public:
  MaxPool1DLayer(std::size_t kernel_size, std::size_t stride);

  std::string_view type_name() const override { return "MaxPooling1D"; }
  Tensor forward(const Tensor& input, Mode mode) override;
  Tensor backward(const Tensor& upstream) override;
  std::vector<std::size_t> output_shape(
      const std::vector<std::size_t>& input_shape) const override;
  std::unique_ptr<Layer> clone() const override;

  std::size_t output_length(std::size_t input_length) const;

 private:
  std::size_t kernel_size_;
  std::size_t stride_;
  std::vector<std::size_t> input_shape_;
  std::vector<std::size_t> argmax_;
  bool cached_ = false;
};

enum class ActivationKind { kReLU, kLeakyReLU, kSigmoid, kTanh };

struct Activation {
  ActivationKind kind = ActivationKind::kReLU;
  double slope = 0.01;  // LeakyReLU only

  static Activation relu() { return {ActivationKind::kReLU, 0.0}; }
  static Activation leaky_relu(double slope = 0.01) {
    return {ActivationKind::kLeakyReLU, slope};
  }
  static Activation sigmoid() { return {ActivationKind::kSigmoid, 0.0}; }
  static Activation tanh() { return {ActivationKind::kTanh, 0.0}; }

  bool operator==(const Activation&) const = default;
};

std::string_view activation_name(ActivationKind kind);
// Accepts relu, leaky_relu, sigmoid, tanh (case-insensitive).
Activation parse_activation(std::string_view name, double slope = 0.01);

double activation_apply(const Activation& act, double x);
// Derivative at x. ReLU and LeakyReLU use the x >= 0 branch at 0.
double activation_derivative(const Activation& act, double x);

class ActivationLayer final : public Layer {
 public:
  explicit ActivationLayer(Activation act);

  std::string_view type_name() const override;
  Tensor forward(const Tensor& input, Mode mode) override;
  Tensor backward(const Tensor& upstream) override;
  std::vector<std::size_t> output_shape(
      const std::vector<std::size_t>& input_shape) const override;
  std::unique_ptr<Layer> clone() const override;

  const Activation& activation() const { return act_; }

 private:
  Activation act_;
  std::optional<Tensor> cached_input_;
};

// (batch x channels x length) -> (batch x channels*length).
class FlattenLayer final : public Layer {
 public:
  std::string_view type_name() const override { return "Flatten"; }
  Tensor forward(const Tensor& input, Mode mode) override;
  Tensor backward(const Tensor& upstream) override;
  std::vector<std::size_t> output_shape(
      const std::vector<std::size_t>& input_shape) const override;
  std::unique_ptr<Layer> clone() const override;

 private:
  std::vector<std::size_t> input_shape_;
};

}  // namespace hemi::nn

#endif  // HEMI_LAYERS_H_
