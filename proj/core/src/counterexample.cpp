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

#include "efsim/counterexample.hpp"

#include <cmath>

#include "efsim/error.hpp"

namespace efsim {

CounterexampleProblem::CounterexampleProblem(double L, double sigma,
                                             std::size_t nodes, DenseVector x0)
    : L_(L), sigma_(sigma), nodes_(nodes), x0_(std::move(x0)) {
  if (!(L_ > 0.0)) throw InvalidArgument("counterexample: L must be positive");
  if (!(sigma_ >= 0.0)) throw InvalidArgument("counterexample: sigma must be >= 0");
  if (nodes_ < 1) throw InvalidArgument("counterexample: nodes must be >= 1");
  if (x0_.dim() != 2) throw DimensionMismatch(2, x0_.dim(), "counterexample x0");
}

double CounterexampleProblem::NodeValue(std::size_t i, const DenseVector& x) const {
  CheckNode(i);
  CheckPoint(x);
  return 0.5 * L_ * NormSq(x);
}

DenseVector CounterexampleProblem::NodeGradient(std::size_t i,
                                                const DenseVector& x) const {
  CheckNode(i);
  CheckPoint(x);
  return L_ * x;
}

std::array<DenseVector, 3> CounterexampleProblem::UnitAtoms() {
  return {DenseVector{2.0, 0.0}, DenseVector{0.0, 1.0}, DenseVector{-2.0, -1.0}};
}

double CounterexampleProblem::AtomScale(double sigma, std::size_t batch) {
  return std::sqrt(3.0 * sigma * sigma / (10.0 * static_cast<double>(batch)));
}

Sample CounterexampleProblem::DrawSample(std::size_t i, std::size_t batch,
                                         RngStream& rng) const {
  CheckNode(i);
  if (batch < 1) throw InvalidArgument("batch size must be >= 1");
  Sample s;
  s.batch = batch;
  if (sigma_ == 0.0) return s;
  const auto atoms = UnitAtoms();
  s.noise = AtomScale(sigma_, batch) * atoms[rng.NextBelow(3)];
  return s;
}

DenseVector CounterexampleProblem::StochasticGradient(std::size_t i,
                                                      const DenseVector& x,
                                                      const Sample& sample) const {
  DenseVector g = NodeGradient(i, x);
  if (!sample.noise.empty()) g += sample.noise;
  return g;
}

SmoothnessInfo CounterexampleProblem::Smoothness() const {
  SmoothnessInfo s;
  s.L = L_;
  s.L_i.assign(nodes_, L_);
  s.FinalizeTilde();
  s.ell_tilde = L_;
  s.f_star = 0.0;
  return s;
}

}  // namespace efsim
