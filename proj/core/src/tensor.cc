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

#include <functional>
#include <numeric>
#include <sstream>
#include <utility>

#include "hemi/error.h"

namespace hemi::nn {
namespace {

std::size_t element_count(const std::vector<std::size_t>& shape) {
  if (shape.empty()) return 0;
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), data_(element_count(shape_), fill) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> values)
    : shape_(std::move(shape)), data_(std::move(values)) {
  if (data_.size() != element_count(shape_)) {
    throw DimensionError("tensor of shape " + shape_string(shape_) +
                         " cannot hold " + std::to_string(data_.size()) +
                         " values");
  }
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, double fill) {
  return Tensor({rows, cols}, fill);
}

Tensor Tensor::sequence(std::size_t batch, std::size_t channels,
                        std::size_t length, double fill) {
  return Tensor({batch, channels, length}, fill);
}

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= shape_.size()) {
    throw DimensionError("axis " + std::to_string(axis) +
                         " out of range for shape " + shape_string(shape_));
  }
  return shape_[axis];
}

std::size_t Tensor::row_size() const {
  if (shape_.empty() || shape_[0] == 0) return 0;
  return data_.size() / shape_[0];
}

std::span<double> Tensor::row(std::size_t r) {
  const std::size_t n = row_size();
  return std::span<double>(data_).subspan(r * n, n);
}

std::span<const double> Tensor::row(std::size_t r) const {
  const std::size_t n = row_size();
  return std::span<const double>(data_).subspan(r * n, n);
}

Tensor Tensor::reshaped(std::vector<std::size_t> shape) const& {
  Tensor copy = *this;
  return std::move(copy).reshaped(std::move(shape));
}

Tensor Tensor::reshaped(std::vector<std::size_t> shape) && {
  if (element_count(shape) != data_.size()) {
    throw DimensionError("cannot reshape " + shape_string(shape_) + " to " +
                         shape_string(shape));
  }
  return Tensor(std::move(shape), std::move(data_));
}

std::string shape_string(std::span<const std::size_t> shape) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << ", ";
    out << shape[i];
  }
  out << ')';
  return out.str();
}

}  // namespace hemi::nn
