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

#include "hemi/loss.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "hemi/error.h"

namespace hemi::nn {
namespace {

void check_labels(std::span<const int> labels, std::size_t batch) {
  if (labels.size() != batch) {
    throw DimensionError("loss got " + std::to_string(batch) +
                         " predictions but " + std::to_string(labels.size()) +
                         " labels");
  }
  for (int y : labels) {
    if (y != 0 && y != 1) {
      throw ValidationError("label " + std::to_string(y) +
                            " is outside {0, 1}");
    }
  }
}

}  // namespace

LossResult bce_loss(const Tensor& probabilities, std::span<const int> labels) {
  if (probabilities.rank() != 2 || probabilities.dim(1) != 1) {
    throw DimensionError("bce loss expects a (batch x 1) input, got " +
                         shape_string(probabilities.shape()));
  }
  const std::size_t batch = probabilities.rows();
  if (batch == 0) throw DimensionError("bce loss on an empty batch");
  check_labels(labels, batch);

  LossResult result{0.0, Tensor::matrix(batch, 1)};
  const double inv_n = 1.0 / static_cast<double>(batch);
  for (std::size_t i = 0; i < batch; ++i) {
    const double p = std::clamp(probabilities[i], kProbabilityClamp,
                                1.0 - kProbabilityClamp);
    const double y = labels[i];
    result.loss -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
    result.grad[i] = (p - y) / (p * (1.0 - p)) * inv_n;
  }
  result.loss *= inv_n;
  return result;
}

double softmax2_positive(double logit0, double logit1) {
  const double m = std::max(logit0, logit1);
  const double e0 = std::exp(logit0 - m);
  const double e1 = std::exp(logit1 - m);
  return e1 / (e0 + e1);
}

LossResult softmax_ce_loss(const Tensor& logits, std::span<const int> labels) {
  if (logits.rank() != 2 || logits.dim(1) != 2) {
    throw DimensionError("softmax cross-entropy expects exactly 2 logits per "
                         "example, got shape " +
                         shape_string(logits.shape()));
  }
  const std::size_t batch = logits.rows();
  if (batch == 0) throw DimensionError("softmax loss on an empty batch");
  check_labels(labels, batch);

  LossResult result{0.0, Tensor::matrix(batch, 2)};
  const double inv_n = 1.0 / static_cast<double>(batch);
  for (std::size_t i = 0; i < batch; ++i) {
    const double z0 = logits.at(i, 0);
    const double z1 = logits.at(i, 1);
    const double m = std::max(z0, z1);
    const double lse = m + std::log(std::exp(z0 - m) + std::exp(z1 - m));
    const int y = labels[i];
    result.loss += lse - (y == 1 ? z1 : z0);
    const double p1 = std::exp(z1 - lse);
    const double p0 = std::exp(z0 - lse);
    result.grad.at(i, 0) = (p0 - (y == 0 ? 1.0 : 0.0)) * inv_n;
    result.grad.at(i, 1) = (p1 - (y == 1 ? 1.0 : 0.0)) * inv_n;
  }
  result.loss *= inv_n;
  return result;
}

}  // namespace hemi::nn
