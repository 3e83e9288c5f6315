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

#ifndef HEMI_OPTIM_H_
#define HEMI_OPTIM_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "hemi/layers.h"

namespace hemi::optim {

enum class Rule { kSgd, kAdagrad, kAdadelta, kRmsprop, kAdam, kAdamax, kNadam, kFtrl };

inline constexpr Rule kAllRules[] = {Rule::kSgd,  Rule::kAdagrad, Rule::kAdadelta,
                                     Rule::kRmsprop, Rule::kAdam, Rule::kAdamax,
                                     Rule::kNadam, Rule::kFtrl};

std::string_view rule_name(Rule rule);
// sgd, adagrad, adadelta, rmsprop, adam, adamax, nadam, ftrl; case-insensitive.
Rule parse_rule(std::string_view name);

struct OptimizerConfig {
  Rule rule = Rule::kAdam;
  double learning_rate = 0.001;
  double momentum = 0.0;   // SGD
  double rho = 0.9;        // RMSprop, Adadelta
  double beta1 = 0.9;      // Adam family
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double l1 = 0.0;         // FTRL
  double l2 = 0.0;
  double beta_ftrl = 1.0;

  // Throws ValidationError when a hyperparameter is out of range. A learning
  // rate of exactly 0 is accepted and freezes the parameters.
  void validate() const;
};

// Defaults: momentum 0 (SGD), rho 0.9 (RMSprop), rho 0.95 and lr multiplier
// as given (Adadelta), beta1 0.9 / beta2 0.999 / eps 1e-8 (Adam family and
// RMSprop), eps 1e-10 (Adagrad), l1 = l2 = 0 and beta 1 (FTRL).
OptimizerConfig default_config(Rule rule, double learning_rate);

// Per-parameter accumulators. Only the buffers a rule uses are allocated;
// they are sized on the first step.
struct SlotState {
  std::uint64_t step = 0;
  std::vector<double> velocity;       // SGD momentum
  std::vector<double> grad_sq_sum;    // Adagrad G
  std::vector<double> avg_sq_grad;    // RMSprop v, Adadelta E[g^2]
  std::vector<double> avg_sq_update;  // Adadelta E[dw^2]
  std::vector<double> first_moment;   // Adam family m
  std::vector<double> second_moment;  // Adam, NAdam v
  std::vector<double> inf_norm;       // AdaMax u
  std::vector<double> z;              // FTRL
  std::vector<double> n;              // FTRL
};

// Each function applies one update of its rule in place. All share the
// contract: params and grads have equal length (else DimensionError), every
// gradient is finite (else NumericError; nothing is modified), the step
// counter increments by one.
void sgd_step(std::span<double> params, std::span<const double> grads,
              SlotState& state, const OptimizerConfig& config);
void adagrad_step(std::span<double> params, std::span<const double> grads,
                  SlotState& state, const OptimizerConfig& config);
void adadelta_step(std::span<double> params, std::span<const double> grads,
                   SlotState& state, const OptimizerConfig& config);
void rmsprop_step(std::span<double> params, std::span<const double> grads,
                  SlotState& state, const OptimizerConfig& config);
void adam_step(std::span<double> params, std::span<const double> grads,
               SlotState& state, const OptimizerConfig& config);
void adamax_step(std::span<double> params, std::span<const double> grads,
                 SlotState& state, const OptimizerConfig& config);
void nadam_step(std::span<double> params, std::span<const double> grads,
                SlotState& state, const OptimizerConfig& config);
// Coordinates whose gradient is exactly zero are skipped (sparse
// per-coordinate FTRL): their z, n and weight stay as they are.
void ftrl_step(std::span<double> params, std::span<const double> grads,
               SlotState& state, const OptimizerConfig& config);

// Dispatches on config.rule.
void step(std::span<double> params, std::span<const double> grads,
          SlotState& state, const OptimizerConfig& config);

// Applies one rule to a fixed set of model parameters.
class Optimizer {
 public:
  Optimizer(OptimizerConfig config, std::vector<nn::Parameter*> params);

  // Uses each parameter's grad buffer.
  void step();

  const OptimizerConfig& config() const { return config_; }
  const std::vector<SlotState>& slots() const { return slots_; }

 private:
  OptimizerConfig config_;
  std::vector<nn::Parameter*> params_;
  std::vector<SlotState> slots_;
};

}  // namespace hemi::optim

#endif  // HEMI_OPTIM_H_
