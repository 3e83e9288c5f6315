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

#include "hemi/training.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "hemi/error.h"

namespace hemi::runner {
namespace {

constexpr std::size_t kInferenceChunk = 256;

nn::Tensor gather_rows(const nn::Tensor& features,
                       std::span<const std::size_t> rows) {
  const std::size_t width = features.row_size();
  nn::Tensor out = nn::Tensor::matrix(rows.size(), width);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = features.row(rows[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

nn::Tensor slice_rows(const nn::Tensor& features, std::size_t begin,
                      std::size_t end) {
  const std::size_t width = features.row_size();
  std::vector<double> values(features.data() + begin * width,
                             features.data() + end * width);
  return nn::Tensor({end - begin, width}, std::move(values));
}

// Batch boundaries; a final batch of one row joins its predecessor.
std::vector<std::size_t> batch_bounds(std::size_t n, std::size_t batch_size) {
  std::vector<std::size_t> bounds;
  for (std::size_t b = 0; b < n; b += batch_size) bounds.push_back(b);
  bounds.push_back(n);
  if (bounds.size() > 2 && n - bounds[bounds.size() - 2] == 1) {
    bounds.erase(bounds.end() - 2);
  }
  return bounds;
}

}  // namespace

ArraySet to_arrays(const std::vector<signal::LabeledExample>& examples) {
  if (examples.empty()) throw ValidationError("no examples");
  const std::size_t width = examples.front().features.size();
  if (width == 0) throw ValidationError("examples have no features");
  ArraySet set;
  set.features = nn::Tensor::matrix(examples.size(), width);
  set.labels.reserve(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& f = examples[i].features;
    if (f.size() != width) {
      throw DimensionError("example " + std::to_string(i) + " has " +
                           std::to_string(f.size()) + " features, expected " +
                           std::to_string(width));
    }
    std::copy(f.begin(), f.end(), set.features.row(i).begin());
    set.labels.push_back(examples[i].label);
  }
  return set;
}

void TrainOptions::validate() const {
  if (batch_size < 2) throw ValidationError("batch_size must be >= 2");
  if (max_epochs < 1) throw ValidationError("max_epochs must be >= 1");
  if (patience < 1) throw ValidationError("patience must be >= 1");
  if (!(min_delta >= 0.0)) throw ValidationError("min_delta must be >= 0");
}

EarlyStopping::EarlyStopping(std::size_t patience, double min_delta)
    : patience_(patience), min_delta_(min_delta) {
  if (patience < 1) throw ValidationError("patience must be >= 1");
}

bool EarlyStopping::update(std::size_t epoch, double val_loss) {
  if (val_loss <= best_loss_ - min_delta_ ||
      (std::isinf(best_loss_) && std::isfinite(val_loss))) {
    best_loss_ = val_loss;
    best_epoch_ = epoch;
    stale_ = 0;
    return true;
  }
  ++stale_;
  return false;
}

std::vector<double> predict_scores(nn::Model& model,
                                   const nn::Tensor& features) {
  std::vector<double> scores;
  scores.reserve(features.rows());
  for (std::size_t b = 0; b < features.rows(); b += kInferenceChunk) {
    const std::size_t e = std::min(features.rows(), b + kInferenceChunk);
    const auto part = model.predict(slice_rows(features, b, e));
    scores.insert(scores.end(), part.begin(), part.end());
  }
  return scores;
}

double mean_loss(nn::Model& model, const ArraySet& set) {
  if (set.size() == 0) throw ValidationError("empty evaluation set");
  double total = 0.0;
  for (std::size_t b = 0; b < set.size(); b += kInferenceChunk) {
    const std::size_t e = std::min(set.size(), b + kInferenceChunk);
    const nn::Tensor out =
        model.forward(slice_rows(set.features, b, e), nn::Mode::kInference);
    const auto labels = std::span<const int>(set.labels).subspan(b, e - b);
    total += model.loss(out, labels).loss * static_cast<double>(e - b);
  }
  return total / static_cast<double>(set.size());
}

TrainHistory train(nn::Model& model, const optim::OptimizerConfig& optimizer,
                   const ArraySet& train_set, const ArraySet& val_set,
                   const TrainOptions& options) {
  options.validate();
  if (train_set.size() < 2) throw ValidationError("training set needs >= 2 examples");
  if (val_set.size() == 0) throw ValidationError("validation set is empty");
  if (train_set.features.row_size() != model.input_dim()) {
    throw DimensionError("model expects " + std::to_string(model.input_dim()) +
                         " features, data has " +
                         std::to_string(train_set.features.row_size()));
  }

  optim::Optimizer opt(optimizer, model.trainable_parameters());
  EarlyStopping stopper(options.patience, options.min_delta);
  std::mt19937_64 rng(options.seed);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto bounds = batch_bounds(order.size(), options.batch_size);

  TrainHistory history;
  nn::ModelState best = model.snapshot();
  std::vector<int> batch_labels;
  for (std::size_t epoch = 1; epoch <= options.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t k = 0; k + 1 < bounds.size(); ++k) {
      const std::span<const std::size_t> rows(order.data() + bounds[k],
                                              bounds[k + 1] - bounds[k]);
      batch_labels.clear();
      for (std::size_t r : rows) batch_labels.push_back(train_set.labels[r]);
      const nn::Tensor out =
          model.forward(gather_rows(train_set.features, rows), nn::Mode::kTraining);
      const nn::LossResult loss = model.loss(out, batch_labels);
      if (!std::isfinite(loss.loss)) {
        std::ostringstream msg;
        msg << "non-finite training loss " << loss.loss << " at epoch " << epoch
            << ", batch " << k + 1;
        throw NumericError(msg.str());
      }
      loss_sum += loss.loss * static_cast<double>(rows.size());
      model.backward(loss.grad);
      opt.step();
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(order.size());
    rec.val_loss = mean_loss(model, val_set);
    if (!std::isfinite(rec.val_loss)) {
      std::ostringstream msg;
      msg << "non-finite validation loss " << rec.val_loss << " at epoch "
          << epoch;
      throw NumericError(msg.str());
    }
    history.epochs.push_back(rec);
    if (options.on_epoch) options.on_epoch(rec);
    if (stopper.update(epoch, rec.val_loss)) best = model.snapshot();
    if (stopper.should_stop()) break;
  }
  model.restore(best);
  history.best_epoch = stopper.best_epoch();
  history.best_val_loss = stopper.best_loss();
  return history;
}

Evaluation evaluate(nn::Model& model, const ArraySet& set) {
  if (set.size() == 0) throw ValidationError("cannot evaluate an empty split");
  Evaluation ev;
  const auto start = std::chrono::steady_clock::now();
  ev.scores = predict_scores(model, set.features);
  ev.inference_s = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  ev.counts = metrics::confusion(ev.scores, set.labels);
  ev.report = metrics::report(ev.counts, ev.scores, set.labels);
  return ev;
}

}  // namespace hemi::runner
