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

#include "efsim/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "efsim/error.hpp"

namespace efsim {

DenseMatrix::DenseMatrix(std::size_t dim, std::vector<double> row_major)
    : dim_(dim), data_(std::move(row_major)) {
  if (data_.size() != dim * dim) {
    throw DimensionMismatch(dim * dim, data_.size(), "DenseMatrix");
  }
}

DenseVector DenseMatrix::Apply(const DenseVector& x) const {
  if (x.dim() != dim_) throw DimensionMismatch(dim_, x.dim(), "DenseMatrix::Apply");
  DenseVector y(dim_);
  for (std::size_t r = 0; r < dim_; ++r) {
    double acc = 0.0;
    const double* row = data_.data() + r * dim_;
    for (std::size_t c = 0; c < dim_; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
  return y;
}

bool DenseMatrix::IsSymmetric(double tol) const {
  for (std::size_t r = 0; r < dim_; ++r) {
    for (std::size_t c = r + 1; c < dim_; ++c) {
      if (std::abs((*this)(r, c) - (*this)(c, r)) > tol) return false;
    }
  }
  return true;
}

DenseVector SolveDense(const DenseMatrix& a, const DenseVector& b) {
  const std::size_t n = a.dim();
  if (b.dim() != n) throw DimensionMismatch(n, b.dim(), "SolveDense");
  std::vector<double> m = a.raw();
  DenseVector x = b;
  double scale = 0.0;
  for (double v : m) scale = std::max(scale, std::abs(v));
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(m[r * n + col]) > std::abs(m[pivot * n + col])) pivot = r;
    }
    if (std::abs(m[pivot * n + col]) <= 1e-14 * std::max(scale, 1.0)) {
      throw NumericFailure("SolveDense: singular matrix", -1);
    }
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(m[col * n + c], m[pivot * n + c]);
      std::swap(x[col], x[pivot]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = m[r * n + col] / m[col * n + col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) m[r * n + c] -= f * m[col * n + c];
      x[r] -= f * x[col];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    double acc = x[i];
    for (std::size_t c = i + 1; c < n; ++c) acc -= m[i * n + c] * x[c];
    x[i] = acc / m[i * n + i];
  }
  return x;
}

DenseVector ConstTridiagonal::Apply(const DenseVector& x) const {
  DenseVector y(dim);
  ApplyAdd(1.0, x, y);
  return y;
}

void ConstTridiagonal::ApplyAdd(double scale, const DenseVector& x,
                                DenseVector& y) const {
  if (x.dim() != dim) throw DimensionMismatch(dim, x.dim(), "ConstTridiagonal::Apply");
  if (y.dim() != dim) throw DimensionMismatch(dim, y.dim(), "ConstTridiagonal::Apply");
  for (std::size_t i = 0; i < dim; ++i) {
    double acc = diag * x[i];
    if (i > 0) acc += off * x[i - 1];
    if (i + 1 < dim) acc += off * x[i + 1];
    y[i] += scale * acc;
  }
}

double ConstTridiagonal::MinEigenvalue() const {
  if (dim == 1) return diag;
  const double c = std::cos(std::numbers::pi / static_cast<double>(dim + 1));
  return diag - 2.0 * std::abs(off) * c;
}

double ConstTridiagonal::MaxEigenvalue() const {
  if (dim == 1) return diag;
  const double c = std::cos(std::numbers::pi / static_cast<double>(dim + 1));
  return diag + 2.0 * std::abs(off) * c;
}

double ConstTridiagonal::SpectralNorm() const {
  return std::max(std::abs(MinEigenvalue()), std::abs(MaxEigenvalue()));
}

DenseVector ConstTridiagonal::Solve(const DenseVector& b) const {
  if (b.dim() != dim) throw DimensionMismatch(dim, b.dim(), "ConstTridiagonal::Solve");
  std::vector<double> c_prime(dim, 0.0);
  DenseVector d = b;
  double denom = diag;
  if (denom == 0.0) throw NumericFailure("ConstTridiagonal::Solve: zero pivot", -1);
  if (dim > 1) c_prime[0] = off / denom;
  d[0] /= denom;
  for (std::size_t i = 1; i < dim; ++i) {
    denom = diag - off * c_prime[i - 1];
    if (denom == 0.0) throw NumericFailure("ConstTridiagonal::Solve: zero pivot", -1);
    if (i + 1 < dim) c_prime[i] = off / denom;
    d[i] = (d[i] - off * d[i - 1]) / denom;
  }
  for (std::size_t i = dim - 1; i-- > 0;) d[i] -= c_prime[i] * d[i + 1];
  return d;
}

DenseMatrix ConstTridiagonal::ToDense() const {
  DenseMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    m(i, i) = diag;
    if (i + 1 < dim) {
      m(i, i + 1) = off;
      m(i + 1, i) = off;
    }
  }
  return m;
}

namespace {

// Deterministic, non-degenerate start vector.
DenseVector StartVector(std::size_t dim) {
  DenseVector v(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    v[i] = 1.0 + 0.5 * std::sin(1.0 + 3.0 * static_cast<double>(i));
  }
  v *= 1.0 / Norm(v);
  return v;
}

}  // namespace

PowerIterationResult PowerIterationSpectralNorm(const LinearOperator& op,
                                                std::size_t dim, double tol,
                                                std::size_t max_iter) {
  if (dim == 0) throw InvalidArgument("PowerIterationSpectralNorm: dim 0");
  DenseVector v = StartVector(dim);
  PowerIterationResult result;
  double previous = 0.0;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    DenseVector w = op(v);
    const double norm = Norm(w);
    result.iterations = it;
    if (norm == 0.0) {
      result.value = 0.0;
      result.converged = true;
      return result;
    }
    result.value = norm;
    w *= 1.0 / norm;
    v = std::move(w);
    if (it > 1 && std::abs(norm - previous) <= tol * norm) {
      result.converged = true;
      return result;
    }
    previous = norm;
  }
  return result;
}

PowerIterationResult PowerIterationMinEigenvalue(const LinearOperator& op,
                                                 std::size_t dim, double tol,
                                                 std::size_t max_iter) {
  const double shift = PowerIterationSpectralNorm(op, dim, tol, max_iter).value;
  auto shifted = [&](const DenseVector& x) {
    DenseVector y = op(x);
    for (std::size_t i = 0; i < dim; ++i) y[i] = shift * x[i] - y[i];
    return y;
  };
  PowerIterationResult top = PowerIterationSpectralNorm(shifted, dim, tol, max_iter);
  top.value = shift - top.value;
  return top;
}

}  // namespace efsim
