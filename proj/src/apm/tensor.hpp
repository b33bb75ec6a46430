// Copyright 2026 The apm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace apm {

// Dense row-major matrix of doubles. Vectors are 1×n, scalars 1×1.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols, double fill = 0.0);
  Tensor(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Tensor Scalar(double value) { return Tensor(1, 1, value); }
  static Tensor Row(std::vector<double> values);
  static Tensor Identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  std::vector<std::size_t> shape() const { return {rows_, cols_}; }
  bool SameShape(const Tensor& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const double& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator[](std::size_t i) { return data_[i]; }
  const double& operator[](std::size_t i) const { return data_[i]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  double item() const;
  void Fill(double value);
  bool AllFinite() const;
  std::string ShapeString() const;

  Tensor& operator+=(const Tensor& other);
  bool operator==(const Tensor& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Throws a dimension error naming both shapes when `ok` is false.
void CheckShapes(bool ok, const char* op, const Tensor& a, const Tensor& b);

// out = a·b, plain triple loop in i-k-j order.
Tensor MatMul(const Tensor& a, const Tensor& b);
// out += aᵀ·b
void MatMulTransAAccumulate(const Tensor& a, const Tensor& b, Tensor& out);
// out += a·bᵀ
void MatMulTransBAccumulate(const Tensor& a, const Tensor& b, Tensor& out);

}  // namespace apm
