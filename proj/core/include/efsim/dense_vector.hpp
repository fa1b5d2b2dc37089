// Copyright 2026 The efsim Authors.
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
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace efsim {

/// Real vector in R^d stored densely in double precision. Used for the model
/// iterate, gradients and every per-node estimator.
class DenseVector {
 public:
  DenseVector() = default;
  explicit DenseVector(std::size_t dim, double fill = 0.0)
      : data_(dim, fill) {}
  DenseVector(std::initializer_list<double> values) : data_(values) {}
  explicit DenseVector(std::vector<double> values)
      : data_(std::move(values)) {}

  static DenseVector Zeros(std::size_t dim) { return DenseVector(dim); }

  std::size_t dim() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  const std::vector<double>& raw() const { return data_; }

  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  void SetZero();
  bool AllFinite() const;

  DenseVector& operator+=(const DenseVector& other);
  DenseVector& operator-=(const DenseVector& other);
  DenseVector& operator*=(double s);

  /// Bitwise comparison of every entry (NaN compares unequal).
  friend bool operator==(const DenseVector& a, const DenseVector& b) {
    return a.data_ == b.data_;
  }

 private:
  std::vector<double> data_;
};

DenseVector operator+(DenseVector a, const DenseVector& b);
DenseVector operator-(DenseVector a, const DenseVector& b);
DenseVector operator*(double s, DenseVector a);

/// Sum of a_j * b_j in ascending index order.
double Dot(const DenseVector& a, const DenseVector& b);
double NormSq(const DenseVector& a);
double Norm(const DenseVector& a);

/// y <- y + a * x
void Axpy(double a, const DenseVector& x, DenseVector& y);

/// Throws DimensionMismatch unless a.dim() == b.dim().
void RequireSameDim(const DenseVector& a, const DenseVector& b,
                    const char* where);

/// Throws NumericFailure when any entry is NaN or Inf.
void RequireFinite(const DenseVector& v, const std::string& what,
                   long long round = -1);

/// Mean of equally-sized vectors, accumulated in the order given.
DenseVector Mean(std::span<const DenseVector> vs);

}  // namespace efsim
