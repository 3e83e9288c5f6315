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

#include "hemi/optim.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>
#include <utility>

#include "hemi/error.h"

namespace hemi::optim {
namespace {

void check(std::span<double> params, std::span<const double> grads) {
  if (params.size() != grads.size()) {
    throw DimensionError("optimizer got " + std::to_string(params.size()) +
                         " parameters but " + std::to_string(grads.size()) +
                         " gradients");
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      throw NumericError("non-finite gradient at index " + std::to_string(i));
    }
  }
}

void ensure(std::vector<double>& buffer, std::size_t n) {
  if (buffer.size() != n) buffer.assign(n, 0.0);
}

bool in_open_unit(double x) { return x > 0.0 && x < 1.0; }

}  // namespace

std::string_view rule_name(Rule rule) {
  switch (rule) {
    case Rule::kSgd: return "sgd";
    case Rule::kAdagrad: return "adagrad";
    case Rule::kAdadelta: return "adadelta";
    case Rule::kRmsprop: return "rmsprop";
    case Rule::kAdam: return "adam";
    case Rule::kAdamax: return "adamax";
    case Rule::kNadam: return "nadam";
    case Rule::kFtrl: return "ftrl";
  }
  return "unknown";
}

Rule parse_rule(std::string_view name) {
  std::string n(name);
  std::transform(n.begin(), n.end(), n.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  for (Rule r : kAllRules) {
    if (rule_name(r) == n) return r;
  }
  throw ValidationError("unknown optimizer '" + std::string(name) + "'");
}

void OptimizerConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ValidationError("learning_rate must be a finite value >= 0");
  }
  if (!(momentum >= 0.0)) throw ValidationError("momentum must be >= 0");
  if (!in_open_unit(rho)) throw ValidationError("rho must lie in (0, 1)");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) {
    throw ValidationError("beta1 must lie in [0, 1)");
  }
  if (!in_open_unit(beta2)) throw ValidationError("beta2 must lie in (0, 1)");
  if (!(epsilon >= 0.0)) throw ValidationError("epsilon must be >= 0");
  if (!(l1 >= 0.0) || !(l2 >= 0.0) || !(beta_ftrl >= 0.0)) {
    throw ValidationError("l1, l2 and beta_ftrl must be >= 0");
  }
}

OptimizerConfig default_config(Rule rule, double learning_rate) {
  OptimizerConfig c;
  c.rule = rule;
  c.learning_rate = learning_rate;
  switch (rule) {
    case Rule::kAdagrad: c.epsilon = 1e-10; break;
    case Rule::kAdadelta: c.rho = 0.95; c.epsilon = 1e-6; break;
    default: break;
  }
  return c;
}

void sgd_step(std::span<double> params, std::span<const double> grads,
              SlotState& state, const OptimizerConfig& config) {
  check(params, grads);
  ++state.step;
  const double lr = config.learning_rate;
  if (config.momentum == 0.0) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * grads[i];
    return;
  }
  ensure(state.velocity, params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    double& v = state.velocity[i];
    v = config.momentum * v + grads[i];
    params[i] -= lr * v;
  }
}

void adagrad_step(std::span<double> params, std::span<const double> grads,
                  SlotState& state, const OptimizerConfig& config) {
  check(params, grads);
  ++state.step;
  ensure(state.grad_sq_sum, params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    double& acc = state.grad_sq_sum[i];
    acc += g * g;
    if (g == 0.0) continue;
    params[i] -= config.learning_rate * g / (std::sqrt(acc) + config.epsilon);
  }
}

void adadelta_step(std::span<double> params, std::span<const double> grads,
                   SlotState& state, const OptimizerConfig& config) {
  check(params, grads);
  ++state.step;
  ensure(state.avg_sq_grad, params.size());
  ensure(state.avg_sq_update, params.size());
  const double rho = config.rho;
  const double eps = config.epsilon;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    double& eg2 = state.avg_sq_grad[i];
    double& edx2 = state.avg_sq_update[i];
    eg2 = rho * eg2 + (1.0 - rho) * g * g;
    const double delta = -(std::sqrt(edx2 + eps) / std::sqrt(eg2 + eps)) * g;
    edx2 = rho * edx2 + (1.0 - rho) * delta * delta;
    if (delta == 0.0) continue;
    params[i] += config.learning_rate * delta;
  }
}

void rmsprop_step(std::span<double> params, std::span<const double> grads,
                  SlotState& state, const OptimizerConfig& config) {
  check(params, grads);
  ++state.step;
  ensure(state.avg_sq_grad, params.size());
  const double rho = config.rho;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    double& v = state.avg_sq_grad[i];
    v = rho * v + (1.0 - rho) * g * g;
    if (g == 0.0) continue;
    params[i] -= config.learning_rate * g / (std::sqrt(v) + config.epsilon);
  }
}

void adam_step(std::span<double> params, std::span<const double> grads,
               SlotState& state, const OptimizerConfig& config) {
  check(params, grads);
  const auto t = static_cast<double>(++state.step);
  ensure(state.first_moment, params.size());
  ensure(state.second_moment, params.size());
  const double b1 = config.beta1;
  const double b2 = config.beta2;
  const double c1 = 1.0 - std::pow(b1, t);
  const double c2 = 1.0 - std::pow(b2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g * g;
    if (m == 0.0) continue;
    const double m_hat = m / c1;
    const double v_hat = v / c2;
    params[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
  }
}

void adamax_step(std::span<double> params, std::span<const double> grads,
                 SlotState& state, const OptimizerConfig& config) {
  check(params, grads);
  const auto t = static_cast<double>(++state.step);
  ensure(state.first_moment, params.size());
  ensure(state.inf_norm, params.size());
  const double b1 = config.beta1;
  const double step_size = config.learning_rate / (1.0 - std::pow(b1, t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    double& m = state.first_moment[i];
    double& u = state.inf_norm[i];
    m = b1 * m + (1.0 - b1) * g;
    u = std::max(config.beta2 * u, std::abs(g));
    if (m == 0.0) continue;
    params[i] -= step_size * m / (u + config.epsilon);
  }
}

void nadam_step(std::span<double> params, std::span<const double> grads,
                SlotState& state, const OptimizerConfig& config) {
  check(params, grads);
  const auto t = static_cast<double>(++state.step);
  ensure(state.first_moment, params.size());
  ensure(state.second_moment, params.size());
  const double b1 = config.beta1;
  const double b2 = config.beta2;
  const double c1 = 1.0 - std::pow(b1, t);
  const double c2 = 1.0 - std::pow(b2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g * g;
    const double numerator = b1 * (m / c1) + (1.0 - b1) * g / c1;
    if (numerator == 0.0) continue;
    params[i] -= config.learning_rate * numerator /
                 (std::sqrt(v / c2) + config.epsilon);
  }
}

void ftrl_step(std::span<double> params, std::span<const double> grads,
               SlotState& state, const OptimizerConfig& config) {
  check(params, grads);
  ++state.step;
  ensure(state.z, params.size());
  ensure(state.n, params.size());
  const double lr = config.learning_rate;
  if (lr == 0.0) return;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    if (g == 0.0) continue;
    double& z = state.z[i];
    double& n = state.n[i];
    const double n_new = n + g * g;
    const double sigma = (std::sqrt(n_new) - std::sqrt(n)) / lr;
    z += g - sigma * params[i];
    n = n_new;
    if (std::abs(z) <= config.l1) {
      params[i] = 0.0;
    } else {
      const double sign = z < 0.0 ? -1.0 : 1.0;
      params[i] = -(z - sign * config.l1) /
                  ((config.beta_ftrl + std::sqrt(n)) / lr + config.l2);
    }
  }
}

void step(std::span<double> params, std::span<const double> grads,
          SlotState& state, const OptimizerConfig& config) {
  switch (config.rule) {
    case Rule::kSgd: return sgd_step(params, grads, state, config);
    case Rule::kAdagrad: return adagrad_step(params, grads, state, config);
    case Rule::kAdadelta: return adadelta_step(params, grads, state, config);
    case Rule::kRmsprop: return rmsprop_step(params, grads, state, config);
    case Rule::kAdam: return adam_step(params, grads, state, config);
    case Rule::kAdamax: return adamax_step(params, grads, state, config);
    case Rule::kNadam: return nadam_step(params, grads, state, config);
    case Rule::kFtrl: return ftrl_step(params, grads, state, config);
  }
  throw ValidationError("unknown optimizer rule");
}

Optimizer::Optimizer(OptimizerConfig config, std::vector<nn::Parameter*> params)
    : config_(config), params_(std::move(params)), slots_(params_.size()) {
  config_.validate();
  for (const nn::Parameter* p : params_) {
    if (!p->trainable) {
      throw ValidationError("parameter '" + p->name + "' is not trainable");
    }
  }
}

void Optimizer::step() {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    nn::Parameter& p = *params_[i];
    if (p.grad.size() != p.value.size()) {
      throw StateError("parameter '" + p.name + "' has no gradient; run "
                       "backward before stepping");
    }
    optim::step(p.value, p.grad, slots_[i], config_);
  }
}

}  // namespace hemi::optim
