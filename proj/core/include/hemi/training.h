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

#ifndef HEMI_TRAINING_H_
#define HEMI_TRAINING_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "hemi/dataset.h"
#include "hemi/metrics.h"
#include "hemi/model.h"
#include "hemi/optim.h"
#include "hemi/tensor.h"

namespace hemi::runner {

// Examples as a (n x features) matrix plus labels.
struct ArraySet {
  nn::Tensor features;
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
};

// Throws ValidationError on an empty list and DimensionError when feature
// lengths differ.
ArraySet to_arrays(const std::vector<signal::LabeledExample>& examples);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainOptions {
  std::size_t batch_size = 32;
  std::size_t max_epochs = 150;
  std::size_t patience = 10;
  double min_delta = 1e-5;
  std::uint64_t seed = 0;  // per-epoch shuffling
  std::function<void(const EpochRecord&)> on_epoch;  // optional progress hook

  void validate() const;
};

// Tracks the best validation loss. An epoch improves when its loss is below
// the best so far by at least min_delta; `patience` consecutive epochs
// without improvement request a stop.
class EarlyStopping {
 public:
  EarlyStopping(std::size_t patience, double min_delta);

  // Returns true when `val_loss` is a new best.
  bool update(std::size_t epoch, double val_loss);
  bool should_stop() const { return stale_ >= patience_; }
  std::size_t best_epoch() const { return best_epoch_; }
  double best_loss() const { return best_loss_; }

 private:
  std::size_t patience_;
  double min_delta_;
  std::size_t stale_ = 0;
  std::size_t best_epoch_ = 0;
  double best_loss_ = std::numeric_limits<double>::infinity();
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double best_val_loss = 0.0;
  std::size_t epochs_run() const { return epochs.size(); }
};

// Mini-batch training with a fresh seeded shuffle each epoch. A trailing
// batch of a single example is folded into the previous batch so batch
// normalisation always sees at least two rows. On return the model holds
// the weights of the best validation epoch. A non-finite loss throws
// NumericError naming the epoch and batch.
TrainHistory train(nn::Model& model, const optim::OptimizerConfig& optimizer,
                   const ArraySet& train_set, const ArraySet& val_set,
                   const TrainOptions& options);

// Mean loss over a set in inference mode.
double mean_loss(nn::Model& model, const ArraySet& set);

// Inference-mode positive-class scores, evaluated in chunks.
std::vector<double> predict_scores(nn::Model& model, const nn::Tensor& features);

struct Evaluation {
  std::vector<double> scores;
  metrics::ConfusionCounts counts;
  metrics::MetricsReport report;
  double inference_s = 0.0;
};

// One inference pass over the set. Throws ValidationError when it is empty.
Evaluation evaluate(nn::Model& model, const ArraySet& set);

}  // namespace hemi::runner

#endif  // HEMI_TRAINING_H_
