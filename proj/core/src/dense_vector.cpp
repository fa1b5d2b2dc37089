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

#include "efsim/dense_vector.hpp"

#include <algorithm>
#include <cmath>

#include "efsim/error.hpp"

namespace efsim {

void DenseVector::SetZero() { std::fill(data_.begin(), data_.end(), 0.0); }

bool DenseVector::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

DenseVector& DenseVector::operator+=(const DenseVector& other) {
  RequireSameDim(*this, other, "DenseVector::operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

DenseVector& DenseVector::operator-=(const DenseVector& other) {
  RequireSameDim(*this, other, "DenseVector::operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

DenseVector& DenseVector::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

DenseVector operator+(DenseVector a, const DenseVector& b) { return a += b; }
DenseVector operator-(DenseVector a, const DenseVector& b) { return a -= b; }
DenseVector operator*(double s, DenseVector a) { return a *= s; }

double Dot(const DenseVector& a, const DenseVector& b) {
  RequireSameDim(a, b, "Dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) acc += a[i] * b[i];
  return acc;
}

double NormSq(const DenseVector& a) {
  double acc = 0.0;
  for (double v : a) acc += v * v;
  return acc;
}

double Norm(const DenseVector& a) { return std::sqrt(NormSq(a)); }

void Axpy(double a, const DenseVector& x, DenseVector& y) {
  RequireSameDim(y, x, "Axpy");
  for (std::size_t i = 0; i < x.dim(); ++i) y[i] += a * x[i];
}

void RequireSameDim(const DenseVector& a, const DenseVector& b,
                    const char* where) {
  if (a.dim() != b.dim()) throw DimensionMismatch(a.dim(), b.dim(), where);
}

void RequireFinite(const DenseVector& v, const std::string& what,
                   long long round) {
  if (!v.AllFinite()) throw NumericFailure(what + " is not finite", round);
}

DenseVector Mean(std::span<const DenseVector> vs) {
  if (vs.empty()) throw InvalidArgument("Mean of an empty set of vectors");
  DenseVector acc(vs.front().dim());
  for (const auto& v : vs) acc += v;
  acc *= 1.0 / static_cast<double>(vs.size());
  return acc;
}

}  // namespace efsim
