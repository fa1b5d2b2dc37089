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
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "efsim/dense_vector.hpp"
#include "efsim/linalg.hpp"
#include "efsim/problem.hpp"
#include "efsim/rng.hpp"

namespace efsim {

/// Symmetric matrix of one node: either a constant tridiagonal (the only
/// structure the generator produces) or a general dense matrix.
struct QuadMatrix {
  std::optional<ConstTridiagonal> tri;
  std::optional<DenseMatrix> dense;

  std::size_t dim() const;
  DenseVector Apply(const DenseVector& x) const;
  DenseMatrix ToDense() const;
};

/// Distributed quadratic f_i(x) = 0.5 x^T Q_i x - x^T b_i.
struct QuadraticTask {
  std::vector<QuadMatrix> q;
  std::vector<DenseVector> b;
  DenseVector x0;
  double lambda = 0.0;
  double scale = 0.0;
  std::uint64_t seed = 0;

  std::size_t nodes() const { return q.size(); }
  std::size_t dim() const { return x0.dim(); }
  bool is_tridiagonal() const;
  void Validate() const;
};

/// Random task following the tridiagonal generation procedure: per node
/// mu_s = 1 + s*xi_s, mu_b = s*xi_b, b_i = (mu_s/4)(-1 + mu_b, 0, ..., 0),
/// Q_i = (mu_s/4) Tridiag(-1, 2, -1); every Q_i is then shifted so that the
/// mean matrix has smallest eigenvalue `lambda`. Draws use the
/// (seed, 0, 0, auxiliary) stream.
QuadraticTask GenerateQuadratic(std::size_t n, std::size_t d, double lambda,
                                double s, std::uint64_t seed);

/// Textual, lossless (%.17g) task file.
void SaveQuadraticTask(const QuadraticTask& task, const std::string& path);
QuadraticTask LoadQuadraticTask(const std::string& path);

/// Quadratic objective with additive Gaussian noise: each coordinate has
/// variance sigma^2/d so that E||noise||^2 = sigma^2. A batch of B samples
/// averages B independent noise vectors.
class QuadraticProblem : public Problem {
 public:
  QuadraticProblem(QuadraticTask task, double sigma);

  std::string name() const override { return "quadratic"; }
  std::size_t dim() const override { return task_.dim(); }
  std::size_t nodes() const override { return task_.nodes(); }
  DenseVector x0() const override { return task_.x0; }

  double NodeValue(std::size_t i, const DenseVector& x) const override;
  DenseVector NodeGradient(std::size_t i, const DenseVector& x) const override;
  double Value(const DenseVector& x) const override;
  DenseVector Gradient(const DenseVector& x) const override;

  Sample DrawSample(std::size_t i, std::size_t batch,
                    RngStream& rng) const override;
  DenseVector StochasticGradient(std::size_t i, const DenseVector& x,
                                 const Sample& sample) const override;

  SmoothnessInfo Smoothness() const override { return smoothness_; }
  std::optional<double> NoiseVariance() const override { return sigma_ * sigma_; }

  const QuadraticTask& task() const { return task_; }
  double sigma() const { return sigma_; }
  /// Minimiser of f, i.e. the solution of mean(Q) x = mean(b).
  const DenseVector& minimizer() const { return x_star_; }
  /// Smallest eigenvalue of the mean matrix.
  double mean_min_eigenvalue() const { return mean_min_eig_; }

 private:
  QuadraticTask task_;
  double sigma_;
  QuadMatrix mean_q_;
  DenseVector mean_b_;
  DenseVector x_star_;
  double mean_min_eig_ = 0.0;
  SmoothnessInfo smoothness_;
};

/// Spectral norm of a node matrix: closed form for tridiagonals, power
/// iteration (relative tolerance 1e-8) for dense matrices.
double QuadSpectralNorm(const QuadMatrix& m);
/// Smallest eigenvalue, same strategy.
double QuadMinEigenvalue(const QuadMatrix& m);

}  // namespace efsim
