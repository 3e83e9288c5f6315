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

#ifndef HEMI_LOSS_H_
#define HEMI_LOSS_H_

#include <span>

#include "hemi/tensor.h"

namespace hemi::nn {

struct LossResult {
  double loss = 0.0;
  Tensor grad;  // d(loss)/d(input), same shape as the loss input
};

inline constexpr double kProbabilityClamp = 1e-7;

// Mean binary cross-entropy of a (batch x 1) probability column. Probabilities
// are clamped to [1e-7, 1 - 1e-7] before the logarithm. Labels must be 0 or 1.
LossResult bce_loss(const Tensor& probabilities, std::span<const int> labels);

// Mean softmax cross-entropy of (batch x 2) logits; the gradient is
// (softmax - onehot) / batch.
LossResult softmax_ce_loss(const Tensor& logits, std::span<const int> labels);

// Two-class softmax probability of class 1.
double softmax2_positive(double logit0, double logit1);

}  // namespace hemi::nn

#endif  // HEMI_LOSS_H_
