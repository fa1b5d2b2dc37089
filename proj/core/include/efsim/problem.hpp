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
#include "efsim/rng.hpp"

namespace efsim {

/// Smoothness constants of a distributed objective f = (1/n) sum_i f_i.
struct SmoothnessInfo {
  double L = 0.0;
  std::vector<double> L_i;
  double L_tilde = 0.0;
  std::optional<double> ell_tilde;
  std::optional<double> f_star;
  /// True when the constants are analytic upper bounds rather than exact.
  bool upper_bound = false;

  /// Fills L_tilde = sqrt(mean L_i^2).
  void FinalizeTilde();
};

/// Randomness of one stochastic-gradient query, drawn separately from its
/// evaluation so that the same sample can be evaluated at two points.
struct Sample {
  std::size_t batch = 0;
  /// Additive noise (empty when the problem is noiseless).
  DenseVector noise;
  /// Example indices for finite-sum problems, with replacement.
  std::vector<std::uint32_t> indices;
};

/// Oracle bundle for f(x) = (1/n) sum_i f_i(x). Implementations are
/// read-only after construction and safe to query concurrently.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual std::string name() const = 0;
  virtual std::size_t dim() const = 0;
  virtual std::size_t nodes() const = 0;
  virtual DenseVector x0() const = 0;

  virtual double NodeValue(std::size_t i, const DenseVector& x) const = 0;
  virtual DenseVector NodeGradient(std::size_t i, const DenseVector& x) const = 0;

  /// Mean of the node values, summed in ascending node order.
  virtual double Value(const DenseVector& x) const;
  /// Mean of the node gradients, summed in ascending node order.
  virtual DenseVector Gradient(const DenseVector& x) const;

  /// Draws a mini-batch of `batch` i.i.d. samples for node i.
  virtual Sample DrawSample(std::size_t i, std::size_t batch,
                            RngStream& rng) const = 0;
  virtual DenseVector StochasticGradient(std::size_t i, const DenseVector& x,
                                         const Sample& sample) const = 0;

  virtual SmoothnessInfo Smoothness() const = 0;

  /// Bound on E||grad f_i(x, xi) - grad f_i(x)||^2 for a single sample, when
  /// the problem defines one.
  virtual std::optional<double> NoiseVariance() const { return std::nullopt; }

 protected:
  void CheckNode(std::size_t i) const;
  void CheckPoint(const DenseVector& x) const;
};

}  // namespace efsim
