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

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "hemi/error.h"
#include "oracles.h"

namespace hemi::optim {
namespace {

struct Single {
  double w;
  SlotState state;
  OptimizerConfig config;
  double apply(double g) {
    std::vector<double> p = {w}, gr = {g};
    step(p, gr, state, config);
    w = p[0];
    return w;
  }
};

Single make(Rule rule, double lr, double w0) {
  return {w0, {}, default_config(rule, lr)};
}

TEST(SgdTest, Examples) {
  EXPECT_DOUBLE_EQ(make(Rule::kSgd, 0.1, 1.0).apply(0.5), 0.95);
  EXPECT_EQ(make(Rule::kSgd, 0.1, 1.0).apply(0.0), 1.0);
  Single s = make(Rule::kSgd, 0.1, 1.0);
  s.config.momentum = 0.9;
  EXPECT_NEAR(s.apply(1.0), 0.9, 1e-15);
  EXPECT_NEAR(s.apply(1.0), 0.71, 1e-15);
  EXPECT_NEAR(s.state.velocity[0], 1.9, 1e-15);
}

TEST(AdagradTest, Examples) {
  Single s = make(Rule::kAdagrad, 0.1, 1.0);
  EXPECT_NEAR(s.apply(2.0), 0.9, 1e-9);
  EXPECT_EQ(s.state.grad_sq_sum[0], 4.0);
  EXPECT_NEAR(s.apply(2.0), 0.82929, 1e-5);
  EXPECT_EQ(s.state.grad_sq_sum[0], 8.0);
  const double before = s.w;
  EXPECT_EQ(s.apply(0.0), before);
  EXPECT_EQ(s.state.grad_sq_sum[0], 8.0);
}

TEST(AdagradTest, EffectiveStepNonIncreasing) {
  Single s = make(Rule::kAdagrad, 0.1, 0.0);
  double last = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 20; ++i) {
    const double before = s.w;
    const double step = std::abs(s.apply(1.5) - before);
    EXPECT_LE(step, last);
    last = step;
  }
}

TEST(RmspropTest, Examples) {
  Single s = make(Rule::kRmsprop, 0.1, 1.0);
  s.config.epsilon = 0.0;
  EXPECT_NEAR(s.apply(2.0), 0.68377, 1e-5);
  EXPECT_NEAR(s.state.avg_sq_grad[0], 0.4, 1e-15);
  // 0.4543565 to seven places.
  EXPECT_NEAR(s.apply(2.0), 1.0 - 0.2 / std::sqrt(0.4) - 0.2 / std::sqrt(0.76), 1e-12);
  EXPECT_NEAR(s.state.avg_sq_grad[0], 0.76, 1e-15);
  EXPECT_EQ(make(Rule::kRmsprop, 0.1, 1.0).apply(0.0), 1.0);
}

TEST(AdadeltaTest, Examples) {
  Single s = make(Rule::kAdadelta, 1.0, 0.0);
  EXPECT_NEAR(s.apply(1.0), -0.0044721, 1e-7);
  EXPECT_EQ(make(Rule::kAdadelta, 1.0, 3.0).apply(0.0), 3.0);
  const double small = std::abs(make(Rule::kAdadelta, 1.0, 0.0).apply(1.0));
  const double large = std::abs(make(Rule::kAdadelta, 1.0, 0.0).apply(100.0));
  EXPECT_LT(std::abs(small - large) / small, 0.01);
}

TEST(AdamTest, Examples) {
  EXPECT_NEAR(make(Rule::kAdam, 0.001, 1.0).apply(1.0), 0.999, 1e-9);
  for (double g : {0.01, 3.0, -250.0}) {
    Single s = make(Rule::kAdam, 0.001, 0.0);
    s.config.epsilon = 0.0;
    EXPECT_NEAR(std::abs(s.apply(g)), 0.001, 1e-15);
  }
  EXPECT_EQ(make(Rule::kAdam, 0.001, 1.0).apply(0.0), 1.0);
}

TEST(AdamaxTest, Examples) {
  Single s = make(Rule::kAdamax, 0.001, 1.0);
  EXPECT_NEAR(s.apply(1.0), 0.999, 1e-9);
  EXPECT_NEAR(s.state.first_moment[0], 0.1, 1e-15);
  EXPECT_EQ(s.state.inf_norm[0], 1.0);
  EXPECT_EQ(make(Rule::kAdamax, 0.001, 1.0).apply(0.0), 1.0);
  Single u = make(Rule::kAdamax, 0.001, 1.0);
  u.apply(2.0);
  EXPECT_EQ(u.state.inf_norm[0], 2.0);
  u.apply(0.0);
  EXPECT_NEAR(u.state.inf_norm[0], 1.998, 1e-15);
}

TEST(NadamTest, Examples) {
  EXPECT_NEAR(make(Rule::kNadam, 0.001, 1.0).apply(1.0), 0.9981, 1e-8);
  EXPECT_EQ(make(Rule::kNadam, 0.001, 1.0).apply(0.0), 1.0);
  std::mt19937_64 rng(31);
  std::normal_distribution<double> z(0.0, 1.0);
  Single n = make(Rule::kNadam, 0.01, 0.5), a = make(Rule::kAdam, 0.01, 0.5);
  n.config.beta1 = a.config.beta1 = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double g = z(rng);
    EXPECT_NEAR(n.apply(g), a.apply(g), 1e-12);
  }
}

TEST(FtrlTest, Examples) {
  Single s = make(Rule::kFtrl, 0.1, 0.0);
  EXPECT_NEAR(s.apply(1.0), -0.05, 1e-15);
  EXPECT_EQ(s.state.z[0], 1.0);
  EXPECT_EQ(s.state.n[0], 1.0);
  Single t = make(Rule::kFtrl, 0.1, 0.0);
  t.config.l1 = 2.0;
  EXPECT_EQ(t.apply(1.0), 0.0);
  Single u = make(Rule::kFtrl, 0.1, 0.0);
  EXPECT_EQ(u.apply(0.0), 0.0);
  EXPECT_EQ(u.state.z[0], 0.0);
  EXPECT_EQ(u.state.n[0], 0.0);
}

TEST(OptimizerTest, ThreeStepTrajectoriesMatchScalarTranscription) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> lr_dist(1e-4, 0.5), w_dist(-3.0, 3.0);
  for (Rule rule : kAllRules) {
    for (int trial = 0; trial < 20; ++trial) {
      OptimizerConfig c = default_config(rule, lr_dist(rng));
      if (rule == Rule::kSgd && trial % 2) c.momentum = 0.9;
      if (rule == Rule::kFtrl && trial % 2) c.l1 = 0.01, c.l2 = 0.1;
      const double w0 = w_dist(rng);
      const auto ref = testing::scalar_trajectory(c, w0);
      Single s{w0, {}, c};
      for (int t = 0; t < 3; ++t) {
        EXPECT_NEAR(s.apply(s.w), ref[t], 1e-12) << rule_name(rule) << " trial " << trial;
      }
    }
  }
}

TEST(OptimizerTest, ZeroGradientsLeaveParametersBitIdentical) {
  std::mt19937_64 rng(5);
  for (Rule rule : kAllRules) {
    std::vector<double> p = {0.3, -1.7, 2.5}, g(3, 0.0);
    const auto before = p;
    SlotState state;
    for (int i = 0; i < 4; ++i) step(p, g, state, default_config(rule, 0.1));
    EXPECT_EQ(p, before) << rule_name(rule);
  }
}

TEST(OptimizerTest, AccumulatorsStayNonNegative) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> z(0.0, 10.0);
  for (Rule rule : kAllRules) {
    std::vector<double> p(4, 0.1);
    SlotState s;
    for (int i = 0; i < 30; ++i) {
      std::vector<double> g(4);
      for (double& v : g) v = z(rng);
      step(p, g, s, default_config(rule, 0.05));
    }
    for (const auto* acc : {&s.grad_sq_sum, &s.avg_sq_grad, &s.avg_sq_update,
                            &s.second_moment, &s.inf_norm, &s.n}) {
      for (double v : *acc) EXPECT_GE(v, 0.0) << rule_name(rule);
    }
    EXPECT_EQ(s.step, 30u);
  }
}

TEST(OptimizerTest, Errors) {
  std::vector<double> p(2), g(3);
  SlotState s;
  EXPECT_THROW(step(p, g, s, default_config(Rule::kAdam, 0.1)), DimensionError);
  std::vector<double> bad = {1.0, std::nan("")};
  const std::vector<double> before = p;
  EXPECT_THROW(step(p, bad, s, default_config(Rule::kAdam, 0.1)), NumericError);
  EXPECT_EQ(p, before);
  OptimizerConfig c = default_config(Rule::kRmsprop, 0.1);
  c.rho = 1.0;
  EXPECT_THROW(c.validate(), ValidationError);
  EXPECT_THROW(default_config(Rule::kSgd, -1.0).validate(), ValidationError);
  EXPECT_NO_THROW(default_config(Rule::kSgd, 0.0).validate());
  EXPECT_EQ(parse_rule("AdaMax"), Rule::kAdamax);
  EXPECT_THROW(parse_rule("lion"), ValidationError);
}

TEST(OptimizerTest, ClassStepsEveryParameter) {
  nn::Parameter a{"a", {1.0, 2.0}, {0.5, 0.5}, true};
  nn::Parameter b{"b", {3.0}, {}, true};
  Optimizer opt(default_config(Rule::kSgd, 0.1), {&a});
  opt.step();
  EXPECT_DOUBLE_EQ(a.value[0], 0.95);
  Optimizer missing(default_config(Rule::kSgd, 0.1), {&b});
  EXPECT_THROW(missing.step(), StateError);
  nn::Parameter frozen{"f", {1.0}, {}, false};
  EXPECT_THROW(Optimizer(default_config(Rule::kSgd, 0.1), {&frozen}), ValidationError);
}

TEST(OptimizerTest, DeterministicTrajectories) {
  auto run = [] {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> p(5, 0.0);
    SlotState s;
    for (int i = 0; i < 10; ++i) {
      std::vector<double> g(5);
      for (double& v : g) v = z(rng);
      step(p, g, s, default_config(Rule::kNadam, 0.01));
    }
    return p;
  };
  EXPECT_EQ(run(), run());
}

}  // namespace
}  // namespace hemi::optim
