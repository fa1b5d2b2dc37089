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

#include <array>
#include <cstddef>

#include "efsim/dense_vector.hpp"
#include "efsim/problem.hpp"

namespace efsim {

/// f_i(x) = (L/2)||x||^2 on R^2 for every node, with additive noise drawn
/// uniformly from the atoms z1 = (2, 0)c, z2 = (0, 1)c, z3 = (-2, -1)c,
/// c = sqrt(3 sigma^2 / (10 B)). The atoms sum to zero and have mean squared
/// norm sigma^2 / B. Top1 keeps the first coordinate of z1 and z3 and the
/// second of z2, which biases the compressed noise towards +e2.
class CounterexampleProblem : public Problem {
 public:
  CounterexampleProblem(double L, double sigma, std::size_t nodes, DenseVector x0);

  std::string name() const override { return "counterexample"; }
  std::size_t dim() const override { return 2; }
  std::size_t nodes() const override { return nodes_; }
  DenseVector x0() const override { return x0_; }

  double NodeValue(std::size_t i, const DenseVector& x) const override;
  DenseVector NodeGradient(std::size_t i, const DenseVector& x) const override;

  /// One atom per query; the batch size only sets the atom scale.
  Sample DrawSample(std::size_t i, std::size_t batch,
                    RngStream& rng) const override;
  DenseVector StochasticGradient(std::size_t i, const DenseVector& x,
                                 const Sample& sample) const override;

  SmoothnessInfo Smoothness() const override;
  std::optional<double> NoiseVariance() const override { return sigma_ * sigma_; }

  double L() const { return L_; }
  double sigma() const { return sigma_; }

  /// The three unscaled atoms (2,0), (0,1), (-2,-1).
  static std::array<DenseVector, 3> UnitAtoms();
  /// sqrt(3 sigma^2 / (10 B)).
  static double AtomScale(double sigma, std::size_t batch);

 private:
  double L_;
  double sigma_;
  std::size_t nodes_;
  DenseVector x0_;
};

}  // namespace efsim
