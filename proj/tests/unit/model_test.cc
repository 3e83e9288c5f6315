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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "hemi/error.h"
#include "oracles.h"

namespace hemi::nn {
namespace {

std::vector<std::size_t> parameterized_counts(const Model& m) {
  std::vector<std::size_t> out;
  for (const auto& row : m.layer_summaries()) {
    if (row.params.total > 0) out.push_back(row.params.total);
  }
  return out;
}

TEST(ModelTest, BigModelLayerCountsMatchTable) {
  const Model m = build_model(ModelKind::kBig, 15000);
  const std::vector<std::size_t> expected = {
      37502500, 10000, 2501000, 4000, 500500, 2000, 100200, 800, 20100, 400,
      5050,     200,   1275,    100,  390,    60,   160,    40,  11};
  EXPECT_EQ(parameterized_counts(m), expected);
  EXPECT_EQ(count_parameters(m), (ParamCount{40648786, 40639986, 8800}));
}

TEST(ModelTest, SmallModelShape) {
  const Model m = build_model(ModelKind::kSmall, 100);
  const auto rows = m.layer_summaries();
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows[0].params.total, 100u * 64u);  // no bias
  EXPECT_EQ(rows[2].type, "BatchNormalization");
  EXPECT_EQ(rows[3].params.total, 64u * 10u + 10u);
  EXPECT_EQ(rows[5].params.total, 11u);
  EXPECT_EQ(rows.back().output_shape, (std::vector<std::size_t>{1}));
}

TEST(ModelTest, CnnFlattenWidth) {
  const Model m = build_model(ModelKind::kCnn, 15000);
  const auto rows = m.layer_summaries();
  const auto it = std::find_if(rows.begin(), rows.end(),
                               [](const LayerSummary& r) { return r.type == "Flatten"; });
  ASSERT_NE(it, rows.end());
  EXPECT_EQ(it->output_shape, (std::vector<std::size_t>{240000}));
  EXPECT_EQ(rows.back().output_shape, (std::vector<std::size_t>{2}));
}

TEST(ModelTest, EmptyModelCountsZero) {
  const Model m(ModelKind::kSmall, 3, {});
  EXPECT_EQ(count_parameters(m), (ParamCount{0, 0, 0}));
}

TEST(ModelTest, ParseKinds) {
  EXPECT_EQ(parse_model_kind("CNN"), ModelKind::kCnn);
  EXPECT_THROW(parse_model_kind("huge"), ValidationError);
  EXPECT_THROW(build_model(ModelKind::kSmall, 0), ValidationError);
}

TEST(ModelTest, ForwardBackwardPreservesShapes) {
  std::mt19937_64 rng(8);
  for (ModelKind kind : {ModelKind::kBig, ModelKind::kSmall, ModelKind::kCnn}) {
    Model m = build_model(kind, 24);
    const Tensor x = testing::random_tensor({3, 24}, rng);
    const Tensor y = m.forward(x, Mode::kTraining);
    const LossResult l = m.loss(y, std::vector<int>{0, 1, 1});
    EXPECT_EQ(m.backward(l.grad).shape(), x.shape()) << model_kind_name(kind);
    for (double s : m.predict(x)) {
      EXPECT_GT(s, 0.0);
      EXPECT_LT(s, 1.0);
    }
  }
}

TEST(ModelTest, RejectsWrongFeatureCount) {
  Model m = build_model(ModelKind::kSmall, 10);
  EXPECT_THROW(m.forward(Tensor::matrix(2, 11), Mode::kInference), DimensionError);
}

TEST(ModelTest, WholeModelGradients) {
  std::mt19937_64 rng(909);
  ModelOptions opt;
  opt.hidden = Activation::tanh();
  opt.small_hidden = 6;
  opt.cnn_hidden = 5;
  for (int trial = 0; trial < 10; ++trial) {
    opt.seed = static_cast<std::uint64_t>(trial);
    Model small = build_model(ModelKind::kSmall, 7, opt);
    const std::vector<int> y = {0, 1, 1, 0};
    auto r = testing::check_model(small, testing::random_tensor({4, 7}, rng), y);
    EXPECT_LT(r.worst(), 1e-5) << "small " << trial << " " << r.worst_param;

    // Distinct, well separated inputs keep the pooling argmax stable.
    Model cnn = build_model(ModelKind::kCnn, 8, opt);
    const Tensor x({2, 8}, testing::spread_values(16, -1, 1, 0.02, rng));
    r = testing::check_model(cnn, x, {1, 0}, 1e-5, 200);
    EXPECT_LT(r.worst(), 1e-5) << "cnn " << trial << " " << r.worst_param;
  }
}

TEST(ModelTest, SnapshotRestore) {
  std::mt19937_64 rng(4);
  Model m = build_model(ModelKind::kSmall, 5);
  const ModelState s = m.snapshot();
  const Tensor x = testing::random_tensor({4, 5}, rng);
  const auto before = m.predict(x);
  for (Parameter* p : m.parameters()) {
    for (double& v : p->value) v += 0.5;
  }
  EXPECT_NE(m.predict(x), before);
  m.restore(s);
  EXPECT_EQ(m.predict(x), before);
}

TEST(ModelTest, CopyIsDeep) {
  Model a = build_model(ModelKind::kSmall, 4);
  Model b = a;
  a.parameters()[0]->value[0] = 99.0;
  EXPECT_NE(b.parameters()[0]->value[0], 99.0);
}

TEST(ModelTest, SaveLoadRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "hemi_model_test.txt";
  ModelOptions opt;
  opt.seed = 17;
  opt.hidden = Activation::leaky_relu(0.2);
  for (ModelKind kind : {ModelKind::kSmall, ModelKind::kCnn, ModelKind::kBig}) {
    Model m = build_model(kind, 16, opt);
    std::mt19937_64 rng(2);
    const Tensor x = testing::random_tensor({4, 16}, rng);
    m.forward(x, Mode::kTraining);  // moves batch-norm running statistics
    save_model(m, path);
    Model back = load_model(path);
    EXPECT_EQ(back.kind(), kind);
    EXPECT_EQ(back.snapshot(), m.snapshot());
    EXPECT_EQ(back.predict(x), m.predict(x));
  }
  std::filesystem::remove(path);
}

TEST(ModelTest, LoadRejectsGarbage) {
  const auto path = std::filesystem::temp_directory_path() / "hemi_model_bad.txt";
  std::ofstream(path) << "not a model\n";
  EXPECT_THROW(load_model(path), FormatError);
  std::filesystem::remove(path);
  EXPECT_THROW(load_model(path), IoError);
}

TEST(ModelTest, SummaryTableTotals) {
  const std::string t = summary_table(build_model(ModelKind::kBig, 15000));
  EXPECT_NE(t.find("40648786"), std::string::npos);
  EXPECT_NE(t.find("40639986"), std::string::npos);
  EXPECT_NE(t.find("8800"), std::string::npos);
  EXPECT_NE(t.find("dense_9 (Dense)"), std::string::npos);
}

}  // namespace
}  // namespace hemi::nn
