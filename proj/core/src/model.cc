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

#include "hemi/model.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <utility>

#include "hemi/error.h"

namespace hemi::nn {
namespace {

constexpr std::size_t kBigWidths[] = {2500, 1000, 500, 200, 100,
                                      50,   25,   15,  10};
constexpr std::size_t kSmallSecondWidth = 10;
constexpr std::size_t kCnnChannels[] = {16, 64, 128};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string keras_base_name(std::string_view type) {
  if (type == "Dense") return "dense";
  if (type == "BatchNormalization") return "batch_normalization";
  if (type == "ReLU") return "re_lu";
  if (type == "LeakyReLU") return "leaky_re_lu";
  if (type == "Sigmoid") return "sigmoid";
  if (type == "Tanh") return "tanh";
  if (type == "Conv1D") return "conv1d";
  if (type == "MaxPooling1D") return "max_pooling1d";
  if (type == "Flatten") return "flatten";
  return lower(type);
}

std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

}  // namespace

std::string_view model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::kBig: return "big";
    case ModelKind::kSmall: return "small";
    case ModelKind::kCnn: return "cnn";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  const std::string n = lower(name);
  if (n == "big") return ModelKind::kBig;
  if (n == "small") return ModelKind::kSmall;
  if (n == "cnn") return ModelKind::kCnn;
  throw ValidationError("unknown model kind '" + std::string(name) + "'");
}

Model::Model(ModelKind kind, std::size_t input_dim,
             std::vector<std::unique_ptr<Layer>> layers, ModelOptions options)
    : kind_(kind),
      input_dim_(input_dim),
      options_(std::move(options)),
      layers_(std::move(layers)) {}

Model::Model(const Model& other)
    : kind_(other.kind_),
      input_dim_(other.input_dim_),
      options_(other.options_) {
  layers_.reserve(other.layers_.size());
  for (const auto& l : other.layers_) layers_.push_back(l->clone());
}

Model& Model::operator=(const Model& other) {
  if (this != &other) {
    Model copy(other);
    *this = std::move(copy);
  }
  return *this;
}

Tensor Model::forward(const Tensor& features, Mode mode) {
  if (features.rank() != 2 || features.dim(1) != input_dim_) {
    throw DimensionError("model expects (batch x " +
                         std::to_string(input_dim_) + ") features, got " +
                         shape_string(features.shape()));
  }
  Tensor x = kind_ == ModelKind::kCnn
                 ? features.reshaped({features.rows(), 1, input_dim_})
                 : features;
  for (auto& layer : layers_) x = layer->forward(x, mode);
  return x;
}

Tensor Model::backward(const Tensor& upstream) {
  Tensor g = upstream;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) {
    g = (*it)->backward(g);
  }
  if (kind_ == ModelKind::kCnn && g.rank() == 3) {
    g = std::move(g).reshaped({g.dim(0), input_dim_});
  }
  return g;
}

LossResult Model::loss(const Tensor& output, std::span<const int> labels) const {
  return has_softmax_head() ? softmax_ce_loss(output, labels)
                            : bce_loss(output, labels);
}

std::vector<double> Model::positive_scores(const Tensor& output) const {
  std::vector<double> scores(output.rows());
  if (has_softmax_head()) {
    if (output.rank() != 2 || output.dim(1) != 2) {
      throw DimensionError("expected (batch x 2) logits");
    }
    for (std::size_t i = 0; i < scores.size(); ++i) {
      scores[i] = softmax2_positive(output.at(i, 0), output.at(i, 1));
    }
  } else {
    if (output.rank() != 2 || output.dim(1) != 1) {
      throw DimensionError("expected (batch x 1) probabilities");
    }
    for (std::size_t i = 0; i < scores.size(); ++i) scores[i] = output[i];
  }
  return scores;
}

std::vector<double> Model::predict(const Tensor& features) {
  return positive_scores(forward(features, Mode::kInference));
}

std::vector<Parameter*> Model::parameters() {
  std::vector<Parameter*> out;
  for (auto& layer : layers_) {
    for (Parameter* p : layer->parameters()) out.push_back(p);
  }
  return out;
}

std::vector<Parameter*> Model::trainable_parameters() {
  std::vector<Parameter*> out;
  for (Parameter* p : parameters()) {
    if (p->trainable) out.push_back(p);
  }
  return out;
}

ModelState Model::snapshot() const {
  ModelState state;
  for (const auto& layer : layers_) {
    for (const Parameter* p : std::as_const(*layer).parameters()) {
      state.push_back(p->value);
    }
  }
  return state;
}

void Model::restore(const ModelState& state) {
  auto params = parameters();
  if (params.size() != state.size()) {
    throw DimensionError("model state has " + std::to_string(state.size()) +
                         " buffers, model has " +
                         std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i]->value.size() != state[i].size()) {
      throw DimensionError("model state buffer " + std::to_string(i) +
                           " has the wrong length");
    }
    params[i]->value = state[i];
  }
}

std::vector<LayerSummary> Model::layer_summaries() const {
  std::vector<LayerSummary> rows;
  std::map<std::string, int> seen;
  std::vector<std::size_t> shape =
      kind_ == ModelKind::kCnn ? std::vector<std::size_t>{1, input_dim_}
                               : std::vector<std::size_t>{input_dim_};
  for (const auto& layer : layers_) {
    shape = layer->output_shape(shape);
    const std::string type(layer->type_name());
    const std::string base = keras_base_name(type);
    const int index = seen[base]++;
    rows.push_back({index == 0 ? base : base + "_" + std::to_string(index),
                    type, shape, layer->count()});
  }
  return rows;
}

Model build_model(ModelKind kind, std::size_t input_dim,
                  const ModelOptions& options) {
  if (input_dim == 0) throw ValidationError("input_dim must be >= 1");
  std::mt19937_64 rng(options.seed);
  std::vector<std::unique_ptr<Layer>> layers;

  switch (kind) {
    case ModelKind::kBig: {
      std::size_t in = input_dim;
      for (std::size_t width : kBigWidths) {
        layers.push_back(std::make_unique<DenseLayer>(in, width, true, rng));
        layers.push_back(std::make_unique<ActivationLayer>(options.hidden));
        layers.push_back(std::make_unique<BatchNormLayer>(width));
        in = width;
      }
      layers.push_back(std::make_unique<DenseLayer>(in, 1, true, rng));
      layers.push_back(std::make_unique<ActivationLayer>(Activation::sigmoid()));
      break;
    }
    case ModelKind::kSmall: {
      const std::size_t h = options.small_hidden;
      if (h == 0) throw ValidationError("small_hidden must be >= 1");
      layers.push_back(std::make_unique<DenseLayer>(input_dim, h, false, rng));
      layers.push_back(std::make_unique<ActivationLayer>(options.hidden));
      layers.push_back(std::make_unique<BatchNormLayer>(h));
      layers.push_back(
          std::make_unique<DenseLayer>(h, kSmallSecondWidth, true, rng));
      layers.push_back(std::make_unique<ActivationLayer>(options.hidden));
      layers.push_back(
          std::make_unique<DenseLayer>(kSmallSecondWidth, 1, true, rng));
      layers.push_back(std::make_unique<ActivationLayer>(Activation::sigmoid()));
      break;
    }
    case ModelKind::kCnn: {
      if (options.cnn_hidden == 0) throw ValidationError("cnn_hidden must be >= 1");
      std::size_t channels = 1;
      std::size_t length = input_dim;
      for (std::size_t out_channels : kCnnChannels) {
        auto conv = std::make_unique<Conv1DLayer>(channels, out_channels, 3, 1,
                                                  1, rng);
        length = conv->output_length(length);
        layers.push_back(std::move(conv));
        auto pool = std::make_unique<MaxPool1DLayer>(2, 2);
        length = pool->output_length(length);
        layers.push_back(std::move(pool));
        channels = out_channels;
      }
      layers.push_back(std::make_unique<FlattenLayer>());
      layers.push_back(std::make_unique<DenseLayer>(
          channels * length, options.cnn_hidden, true, rng));
      layers.push_back(std::make_unique<ActivationLayer>(
          Activation::leaky_relu(options.cnn_leaky_slope)));
      layers.push_back(
          std::make_unique<DenseLayer>(options.cnn_hidden, 2, true, rng));
      break;
    }
    default:
      throw ValidationError("unknown model kind");
  }
  return Model(kind, input_dim, std::move(layers), options);
}

ParamCount count_parameters(const Model& model) {
  ParamCount c;
  for (std::size_t i = 0; i < model.num_layers(); ++i) c += model.layer(i).count();
  return c;
}

std::string summary_table(const Model& model) {
  const auto rows = model.layer_summaries();
  std::vector<std::string> names, shapes, counts;
  std::size_t w0 = std::string_view("Layer (type)").size();
  std::size_t w1 = std::string_view("Output Shape").size();
  for (const auto& r : rows) {
    names.push_back(r.name + " (" + r.type + ")");
    shapes.push_back(r.output_shape.size() == 1
                         ? std::to_string(r.output_shape[0])
                         : shape_string(r.output_shape));
    counts.push_back(std::to_string(r.params.total));
    w0 = std::max(w0, names.back().size());
    w1 = std::max(w1, shapes.back().size());
  }
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(w0 + 2)) << "Layer (type)"
      << std::setw(static_cast<int>(w1 + 2)) << "Output Shape" << "Param\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << std::left << std::setw(static_cast<int>(w0 + 2)) << names[i]
        << std::setw(static_cast<int>(w1 + 2)) << shapes[i] << counts[i]
        << '\n';
  }
  const ParamCount c = count_parameters(model);
  out << "Total parameters : " << c.total << '\n'
      << "Trainable parameters : " << c.trainable << '\n'
      << "Non-trainable parameters : " << c.non_trainable << '\n';
  return out.str();
}

// Format:
//   hemi-model 1
//   kind <big|small|cnn>
//   input_dim <n>
//   hidden <activation> <slope>
//   small_hidden <n>
//   cnn_hidden <n>
//   cnn_leaky_slope <x>
//   seed <n>
//   buffers <count>
//   <name> <length> v1 ... vn          (one line per buffer)
void save_model(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write model file " + path.string());
  const ModelOptions& o = model.options();
  out << "hemi-model 1\n"
      << "kind " << model_kind_name(model.kind()) << '\n'
      << "input_dim " << model.input_dim() << '\n'
      << "hidden " << activation_name(o.hidden.kind) << ' '
      << format_double(o.hidden.slope) << '\n'
      << "small_hidden " << o.small_hidden << '\n'
      << "cnn_hidden " << o.cnn_hidden << '\n'
      << "cnn_leaky_slope " << format_double(o.cnn_leaky_slope) << '\n'
      << "seed " << o.seed << '\n';
  std::vector<std::pair<std::string, const std::vector<double>*>> buffers;
  for (std::size_t i = 0; i < model.num_layers(); ++i) {
    for (const Parameter* p : model.layer(i).parameters()) {
      buffers.emplace_back(p->name, &p->value);
    }
  }
  out << "buffers " << buffers.size() << '\n';
  for (const auto& [name, values] : buffers) {
    out << name << ' ' << values->size();
    for (double v : *values) out << ' ' << format_double(v);
    out << '\n';
  }
  if (!out) throw IoError("failed writing model file " + path.string());
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read model file " + path.string());
  auto fail = [&](const std::string& what) -> FormatError {
    return FormatError(path.string() + ": " + what);
  };
  auto expect_key = [&](std::string_view key) {
    std::string k;
    if (!(in >> k) || k != key) throw fail("expected '" + std::string(key) + "'");
  };

  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "hemi-model" || version != 1) {
    throw fail("not a hemi model file");
  }
  std::string kind_name, act_name;
  std::size_t input_dim = 0;
  ModelOptions options;
  double slope = 0.0;
  expect_key("kind");
  in >> kind_name;
  expect_key("input_dim");
  in >> input_dim;
  expect_key("hidden");
  in >> act_name >> slope;
  expect_key("small_hidden");
  in >> options.small_hidden;
  expect_key("cnn_hidden");
  in >> options.cnn_hidden;
  expect_key("cnn_leaky_slope");
  in >> options.cnn_leaky_slope;
  expect_key("seed");
  in >> options.seed;
  if (!in) throw fail("truncated header");
  options.hidden = act_name == "leaky_relu" ? Activation::leaky_relu(slope)
                                            : parse_activation(act_name);

  Model model = build_model(parse_model_kind(kind_name), input_dim, options);
  std::size_t count = 0;
  expect_key("buffers");
  in >> count;
  auto params = model.parameters();
  if (count != params.size()) throw fail("buffer count does not match model");
  for (Parameter* p : params) {
    std::string name;
    std::size_t n = 0;
    if (!(in >> name >> n) || name != p->name || n != p->value.size()) {
      throw fail("buffer '" + p->name + "' missing or mis-sized");
    }
    std::string token;
    for (double& v : p->value) {
      if (!(in >> token)) throw fail("buffer '" + p->name + "' truncated");
      const auto [ptr, ec] =
          std::from_chars(token.data(), token.data() + token.size(), v);
      if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw fail("bad value '" + token + "' in buffer '" + p->name + "'");
      }
    }
  }
  return model;
}

}  // namespace hemi::nn
