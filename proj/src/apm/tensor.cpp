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

#include "apm/tensor.hpp"

#include <cmath>
#include <sstream>

#include "apm/errors.hpp"

namespace apm {

Tensor::Tensor(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Tensor::Tensor(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    Fail(ErrorKind::kDimension, "tensor data length " + std::to_string(data_.size()) +
                                    " does not match shape " + ShapeString());
  }
}

Tensor Tensor::Row(std::vector<double> values) {
  const std::size_t n = values.size();
  return Tensor(1, n, std::move(values));
}

Tensor Tensor::Identity(std::size_t n) {
  Tensor t(n, n);
  for (std::size_t i = 0; i < n; ++i) t(i, i) = 1.0;
  return t;
}

double Tensor::item() const {
  if (data_.size() != 1) {
    Fail(ErrorKind::kDimension, "item() on non-scalar tensor " + ShapeString());
  }
  return data_[0];
}

void Tensor::Fill(double value) {
  for (double& x : data_) x = value;
}

bool Tensor::AllFinite() const {
  for (double x : data_) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

std::string Tensor::ShapeString() const {
  std::ostringstream os;
  os << "[" << rows_ << "x" << cols_ << "]";
  return os.str();
}

Tensor& Tensor::operator+=(const Tensor& other) {
  CheckShapes(SameShape(other), "add", *this, other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

void CheckShapes(bool ok, const char* op, const Tensor& a, const Tensor& b) {
  if (!ok) {
    Fail(ErrorKind::kDimension, std::string(op) + ": incompatible shapes " +
                                    a.ShapeString() + " and " + b.ShapeString());
  }
}

Tensor MatMul(const Tensor& a, const Tensor& b) {
  CheckShapes(a.cols() == b.rows(), "matmul", a, b);
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  Tensor out(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    double* o = &out(i, 0);
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a(i, p);
      if (av == 0.0) continue;
      const double* br = &b(p, 0);
      for (std::size_t j = 0; j < m; ++j) o[j] += av * br[j];
    }
  }
  return out;
}

void MatMulTransAAccumulate(const Tensor& a, const Tensor& b, Tensor& out) {
  // a: n×k, b: n×m, out: k×m
  CheckShapes(a.rows() == b.rows() && out.rows() == a.cols() && out.cols() == b.cols(),
              "matmul_ta", a, b);
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  for (std::size_t i = 0; i < n; ++i) {
    const double* br = &b(i, 0);
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a(i, p);
      if (av == 0.0) continue;
      double* o = &out(p, 0);
      for (std::size_t j = 0; j < m; ++j) o[j] += av * br[j];
    }
  }
}

void MatMulTransBAccumulate(const Tensor& a, const Tensor& b, Tensor& out) {
  // a: n×m, b: k×m, out: n×k
  CheckShapes(a.cols() == b.cols() && out.rows() == a.rows() && out.cols() == b.rows(),
              "matmul_tb", a, b);
  const std::size_t n = a.rows(), m = a.cols(), k = b.rows();
  for (std::size_t i = 0; i < n; ++i) {
    const double* ar = &a(i, 0);
    for (std::size_t p = 0; p < k; ++p) {
      const double* br = &b(p, 0);
      double acc = 0.0;
      for (std::size_t j = 0; j < m; ++j) acc += ar[j] * br[j];
      out(i, p) += acc;
    }
  }
}

}  // namespace apm
