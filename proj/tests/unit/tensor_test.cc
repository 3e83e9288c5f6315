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

#include "hemi/tensor.h"

#include <gtest/gtest.h>

#include "hemi/error.h"

namespace hemi::nn {
namespace {

TEST(TensorTest, ShapeAccessors) {
  Tensor t = Tensor::sequence(2, 3, 4, 1.5);
  EXPECT_EQ(t.rank(), 3u);
  EXPECT_EQ(t.size(), 24u);
  EXPECT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.row_size(), 12u);
  EXPECT_EQ(t.dim(2), 4u);
  EXPECT_THROW(t.dim(3), DimensionError);
  EXPECT_DOUBLE_EQ(t.at(1, 2, 3), 1.5);
}

TEST(TensorTest, ValuesMustMatchShape) {
  EXPECT_THROW(Tensor({2, 2}, std::vector<double>{1, 2, 3}), DimensionError);
}

TEST(TensorTest, RowViewsAreContiguous) {
  Tensor t({2, 3}, std::vector<double>{1, 2, 3, 4, 5, 6});
  auto r = t.row(1);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0], 4);
  EXPECT_EQ(t.at(1, 2), 6);
}

TEST(TensorTest, ReshapeKeepsValues) {
  Tensor t({2, 3}, std::vector<double>{1, 2, 3, 4, 5, 6});
  Tensor s = t.reshaped({3, 2});
  EXPECT_EQ(s.at(2, 1), 6);
  EXPECT_THROW(t.reshaped({4, 2}), DimensionError);
}

TEST(TensorTest, ShapeString) {
  const std::vector<std::size_t> shape = {4, 1, 15000};
  EXPECT_EQ(shape_string(shape), "(4, 1, 15000)");
}

}  // namespace
}  // namespace hemi::nn
