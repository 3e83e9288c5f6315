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

#ifndef HEMI_TENSOR_H_
#define HEMI_TENSOR_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace hemi::nn {

// Dense row-major array of doubles. Rank 2 tensors are batches of feature
// rows (batch x features); rank 3 tensors are batches of multichannel
// sequences (batch x channels x length).
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);
  Tensor(std::vector<std::size_t> shape, std::vector<double> values);

  static Tensor matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  static Tensor sequence(std::size_t batch, std::size_t channels,
                         std::size_t length, double fill = 0.0);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  // First axis; the batch size.
  std::size_t rows() const { return shape_.empty() ? 0 : shape_[0]; }
  // Product of all axes after the first.
  std::size_t row_size() const;

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  std::span<double> row(std::size_t r);
  std::span<const double> row(std::size_t r) const;

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& at(std::size_t r, std::size_t c) { return data_[r * shape_[1] + c]; }
  double at(std::size_t r, std::size_t c) const {
    return data_[r * shape_[1] + c];
  }
  double& at(std::size_t n, std::size_t c, std::size_t l) {
    return data_[(n * shape_[1] + c) * shape_[2] + l];
  }
  double at(std::size_t n, std::size_t c, std::size_t l) const {
    return data_[(n * shape_[1] + c) * shape_[2] + l];
  }

  // Same values, new shape. Throws DimensionError if the element count
  // differs.
  Tensor reshaped(std::vector<std::size_t> shape) const&;
  Tensor reshaped(std::vector<std::size_t> shape) &&;

  bool operator==(const Tensor& other) const = default;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

std::string shape_string(std::span<const std::size_t> shape);

}  // namespace hemi::nn

#endif  // HEMI_TENSOR_H_
