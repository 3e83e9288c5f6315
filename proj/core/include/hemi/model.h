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

#ifndef HEMI_MODEL_H_
#define HEMI_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hemi/layers.h"
#include "hemi/loss.h"
#include "hemi/tensor.h"

namespace hemi::nn {

// Big: ten dense layers 15000 -> 2500 -> 1000 -> 500 -> 200 -> 100 -> 50 ->
//      25 -> 15 -> 10 -> 1, each of the first nine followed by the hidden
//      activation and batch normalisation; sigmoid head.
// Small: dense (no bias) -> act -> batch norm -> dense(10) -> act ->
//        dense(1) -> sigmoid.
// CNN: three conv(k3, s1, p1) + maxpool(k2, s2) blocks with 16, 64 and 128
//      channels, flatten, dense(hidden) -> LeakyReLU -> dense(2) logits.
enum class ModelKind { kBig, kSmall, kCnn };

std::string_view model_kind_name(ModelKind kind);
// Accepts big, small, cnn (case-insensitive).
ModelKind parse_model_kind(std::string_view name);

struct ModelOptions {
  Activation hidden = Activation::relu();
  std::size_t small_hidden = 64;  // width of the Small model's first layer
  std::size_t cnn_hidden = 64;    // width of the CNN's first dense layer
  double cnn_leaky_slope = 0.01;
  std::uint64_t seed = 0;         // weight initialisation
};

// Every parameter buffer of a model, in layer order, including batch-norm
// running statistics.
using ModelState = std::vector<std::vector<double>>;

struct LayerSummary {
  std::string name;  // e.g. "dense_3"
  std::string type;  // e.g. "Dense"
  std::vector<std::size_t> output_shape;  // per example
  ParamCount params;
};

class Model {
 public:
  Model() = default;
  Model(ModelKind kind, std::size_t input_dim,
        std::vector<std::unique_ptr<Layer>> layers, ModelOptions options = {});
  Model(const Model& other);
  Model& operator=(const Model& other);
  Model(Model&&) noexcept = default;
  Model& operator=(Model&&) noexcept = default;

  ModelKind kind() const { return kind_; }
  std::size_t input_dim() const { return input_dim_; }
  const ModelOptions& options() const { return options_; }
  std::size_t num_layers() const { return layers_.size(); }
  Layer& layer(std::size_t i) { return *layers_.at(i); }
  const Layer& layer(std::size_t i) const { return *layers_.at(i); }

  // features: (batch x input_dim). CNN models treat each row as a
  // single-channel sequence.
  Tensor forward(const Tensor& features, Mode mode);
  // Returns the gradient with respect to the (batch x input_dim) features.
  Tensor backward(const Tensor& upstream);

  // BCE for single-sigmoid heads, softmax cross-entropy for 2-logit heads.
  LossResult loss(const Tensor& output, std::span<const int> labels) const;
  // Probability of class 1 for each row of a forward output.
  std::vector<double> positive_scores(const Tensor& output) const;
  // Inference-mode forward followed by positive_scores.
  std::vector<double> predict(const Tensor& features);

  std::vector<Parameter*> parameters();
  std::vector<Parameter*> trainable_parameters();

  ModelState snapshot() const;
  void restore(const ModelState& state);

  std::vector<LayerSummary> layer_summaries() const;

 private:
  bool has_softmax_head() const { return kind_ == ModelKind::kCnn; }

  ModelKind kind_ = ModelKind::kSmall;
  std::size_t input_dim_ = 0;
  ModelOptions options_;
  std::vector<std::unique_ptr<Layer>> layers_;
};

Model build_model(ModelKind kind, std::size_t input_dim,
                  const ModelOptions& options = {});

ParamCount count_parameters(const Model& model);

// Text table with one row per layer (name (type), output shape, parameter
// count) followed by total / trainable / non-trainable lines.
std::string summary_table(const Model& model);

void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace hemi::nn

#endif  // HEMI_MODEL_H_
