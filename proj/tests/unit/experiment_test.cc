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

#include "hemi/experiment.h"

#include <algorithm>

#include <gtest/gtest.h>

#include "hemi/error.h"
#include "hemi/synthetic.h"

namespace hemi::runner {
namespace {

std::vector<signal::RawRecording> small_corpus() {
  signal::SyntheticConfig sc;
  sc.seed = 21;
  sc.length = 400;
  return signal::generate_synthetic(sc, 2, 2);
}

ExperimentConfig quick(nn::ModelKind model, optim::Rule rule) {
  ExperimentConfig c;
  c.model = model;
  c.optimizer = rule;
  c.learning_rate = 1e-3;
  c.max_epochs = 3;
  c.model_options.small_hidden = 8;
  c.model_options.cnn_hidden = 8;
  c.shap.permutations = 10;
  c.shap.background = 5;
  c.shap.instances = 2;
  c.shap.segment_size = 100;
  c.seed = 5;
  return c;
}

TEST(ExperimentTest, DefaultLearningRates) {
  EXPECT_EQ(default_learning_rate(nn::ModelKind::kBig), 0.01);
  EXPECT_EQ(default_learning_rate(nn::ModelKind::kSmall), 1e-5);
  EXPECT_EQ(default_learning_rate(nn::ModelKind::kCnn), 1e-3);
  ExperimentConfig c;
  c.model = nn::ModelKind::kCnn;
  EXPECT_EQ(c.effective_learning_rate(), 1e-3);
  c.learning_rate = 0.5;
  EXPECT_EQ(c.effective_learning_rate(), 0.5);
}

TEST(ExperimentTest, KeyAndValidation) {
  ExperimentConfig c;
  EXPECT_EQ(c.key(), "beta/necker/small/adam");
  c.learning_rate = -1.0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.learning_rate = 0.0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.max_epochs = 0;
  EXPECT_THROW(c.validate(), ValidationError);
}

TEST(ExperimentTest, ExpandGridCountsAndOrder) {
  const std::vector<signal::Band> bands(signal::kAllBands, signal::kAllBands + 5);
  const std::vector<signal::Dataset> datasets(signal::kAllDatasets, signal::kAllDatasets + 2);
  const std::vector<nn::ModelKind> models = {nn::ModelKind::kBig, nn::ModelKind::kSmall,
                                             nn::ModelKind::kCnn};
  const std::vector<optim::Rule> rules(optim::kAllRules, optim::kAllRules + 8);
  ExperimentConfig base;
  base.max_epochs = 7;
  const auto grid = expand_grid(base, bands, datasets, models, rules);
  ASSERT_EQ(grid.size(), 240u);
  EXPECT_EQ(grid.front().band, signal::Band::kDelta);
  EXPECT_EQ(grid[1].optimizer, rules[1]);
  EXPECT_TRUE(std::all_of(grid.begin(), grid.end(),
                          [](const auto& c) { return c.max_epochs == 7; }));
  std::vector<std::string> keys;
  for (const auto& c : grid) keys.push_back(c.key());
  std::sort(keys.begin(), keys.end());
  EXPECT_EQ(std::adjacent_find(keys.begin(), keys.end()), keys.end());
}

TEST(ExperimentTest, RunCellProducesResult) {
  const auto recs = small_corpus();
  std::vector<std::string> lines;
  const auto out = run_cell(quick(nn::ModelKind::kSmall, optim::Rule::kAdam), recs,
                            [&](const std::string& l) { lines.push_back(l); });
  const RunResult& r = out.result;
  EXPECT_FALSE(r.failed());
  EXPECT_GE(r.epochs, 1u);
  EXPECT_LE(r.epochs, 3u);
  EXPECT_EQ(lines.size(), r.epochs);
  EXPECT_GE(r.test_acc, 0.0);
  EXPECT_LE(r.test_acc, 1.0);
  EXPECT_EQ(out.model.input_dim(), 400u);
  EXPECT_FALSE(out.roc.empty());
  EXPECT_EQ(r.key(), "beta/necker/small/adam");
  if (!r.test.collapsed) {
    EXPECT_TRUE(r.efficient_class == "L" || r.efficient_class == "R");
    EXPECT_TRUE(r.shap_sign == "+ve" || r.shap_sign == "-ve");
  }
}

TEST(ExperimentTest, RunCellIsDeterministic) {
  const auto recs = small_corpus();
  auto a = run_cell(quick(nn::ModelKind::kSmall, optim::Rule::kRmsprop), recs).result;
  auto b = run_cell(quick(nn::ModelKind::kSmall, optim::Rule::kRmsprop), recs).result;
  for (auto* r : {&a, &b}) r->preprocessing_s = r->train_s = r->inference_s = r->shap_s = 0.0;
  EXPECT_EQ(a, b);
}

TEST(ExperimentTest, RunCellNeedsMatchingDataset) {
  signal::SyntheticConfig sc;
  sc.length = 400;
  sc.datasets = {signal::Dataset::kMonaLisa};
  const auto recs = signal::generate_synthetic(sc, 1, 2);
  EXPECT_THROW(run_cell(quick(nn::ModelKind::kSmall, optim::Rule::kAdam), recs),
               ValidationError);
}

TEST(ExperimentTest, GridRowsSortedAndOrderIndependent) {
  const auto recs = small_corpus();
  std::vector<ExperimentConfig> configs = {quick(nn::ModelKind::kSmall, optim::Rule::kSgd),
                                           quick(nn::ModelKind::kSmall, optim::Rule::kAdam)};
  configs[0].shap.permutations = configs[1].shap.permutations = 0;
  auto forward = run_grid(configs, recs);
  std::reverse(configs.begin(), configs.end());
  auto backward = run_grid(configs, recs);
  ASSERT_EQ(forward.size(), 2u);
  for (auto* t : {&forward, &backward}) {
    for (auto& r : *t) r.preprocessing_s = r.train_s = r.inference_s = r.shap_s = 0.0;
  }
  EXPECT_EQ(forward, backward);
  EXPECT_EQ(forward[0].optimizer, optim::Rule::kSgd);  // enum order, not key text
}

TEST(ExperimentTest, GridRejectsDuplicateKeys) {
  const auto c = quick(nn::ModelKind::kSmall, optim::Rule::kSgd);
  EXPECT_THROW(run_grid({c, c}, small_corpus()), ValidationError);
}

TEST(ExperimentTest, GridRecordsFailedCell) {
  auto good = quick(nn::ModelKind::kSmall, optim::Rule::kAdam);
  good.shap.permutations = 0;
  auto bad = good;
  bad.dataset = signal::Dataset::kMonaLisa;  // absent from the corpus below
  signal::SyntheticConfig sc;
  sc.length = 400;
  sc.datasets = {signal::Dataset::kNeckerCube};
  const auto recs = signal::generate_synthetic(sc, 2, 2);
  std::vector<std::string> lines;
  const auto table = run_grid({good, bad}, recs, 1,
                              [&](const std::string& l) { lines.push_back(l); });
  ASSERT_EQ(table.size(), 2u);
  const auto failed = std::count_if(table.begin(), table.end(),
                                    [](const auto& r) { return r.failed(); });
  EXPECT_EQ(failed, 1);
  EXPECT_TRUE(std::any_of(lines.begin(), lines.end(), [](const std::string& l) {
    return l.find("failed") != std::string::npos;
  }));
}

}  // namespace
}  // namespace hemi::runner
