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

#include "efsim/problem.hpp"

#include <cmath>

#include "efsim/error.hpp"

namespace efsim {

void SmoothnessInfo::FinalizeTilde() {
  if (L_i.empty()) {
    L_tilde = L;
    return;
  }
  double s = 0.0;
  for (double l : L_i) s += l * l;
  L_tilde = std::sqrt(s / static_cast<double>(L_i.size()));
}

double Problem::Value(const DenseVector& x) const {
  double s = 0.0;
  for (std::size_t i = 0; i < nodes(); ++i) s += NodeValue(i, x);
  return s / static_cast<double>(nodes());
}

DenseVector Problem::Gradient(const DenseVector& x) const {
  DenseVector g(dim());
  for (std::size_t i = 0; i < nodes(); ++i) g += NodeGradient(i, x);
  g *= 1.0 / static_cast<double>(nodes());
  return g;
}

void Problem::CheckNode(std::size_t i) const {
  if (i >= nodes()) {
    throw InvalidArgument("node index " + std::to_string(i) + " out of range [0, " +
                          std::to_string(nodes()) + ")");
  }
}

void Problem::CheckPoint(const DenseVector& x) const {
  if (x.dim() != dim()) throw DimensionMismatch(dim(), x.dim(), name());
}

}  // namespace efsim
