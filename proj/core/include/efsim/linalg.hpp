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
#include <functional>
#include <vector>

#include "efsim/dense_vector.hpp"

namespace efsim {

/// Row-major square matrix. Only used for small dense problems; generated
/// tasks use ConstTridiagonal.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t dim) : dim_(dim), data_(dim * dim, 0.0) {}
  DenseMatrix(std::size_t dim, std::vector<double> row_major);

  std::size_t dim() const { return dim_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * dim_ + c];
  }
  const std::vector<double>& raw() const { return data_; }

  DenseVector Apply(const DenseVector& x) const;
  bool IsSymmetric(double tol = 0.0) const;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

/// Solves A x = b by Gaussian elimination with partial pivoting. Throws
/// NumericFailure when A is numerically singular.
DenseVector SolveDense(const DenseMatrix& a, const DenseVector& b);

/// Symmetric tridiagonal matrix with a constant diagonal and a constant
/// off-diagonal. Its spectrum is diag + 2*off*cos(k*pi/(d+1)), k = 1..d.
struct ConstTridiagonal {
  std::size_t dim = 0;
  double diag = 0.0;
  double off = 0.0;

  DenseVector Apply(const DenseVector& x) const;
  /// y <- y + scale * A x, without allocating.
  void ApplyAdd(double scale, const DenseVector& x, DenseVector& y) const;
  double MinEigenvalue() const;
  double MaxEigenvalue() const;
  double SpectralNorm() const;
  /// Thomas algorithm; requires a nonsingular, diagonally stable system.
  DenseVector Solve(const DenseVector& b) const;
  DenseMatrix ToDense() const;
};

struct PowerIterationResult {
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

using LinearOperator = std::function<DenseVector(const DenseVector&)>;

/// Largest |eigenvalue| of a symmetric operator. Stops once the relative
/// change of the estimate falls below `tol`.
PowerIterationResult PowerIterationSpectralNorm(const LinearOperator& op,
                                                std::size_t dim,
                                                double tol = 1e-8,
                                                std::size_t max_iter = 200000);

/// Smallest eigenvalue of a symmetric operator via power iteration on
/// (s I - A) with s = spectral norm of A.
PowerIterationResult PowerIterationMinEigenvalue(const LinearOperator& op,
                                                 std::size_t dim,
                                                 double tol = 1e-10,
                                                 std::size_t max_iter = 500000);

}  // namespace efsim
