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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "efsim/dense_vector.hpp"
#include "efsim/problem.hpp"

namespace efsim {

/// Labelled examples with dense features. Labels are 1-based.
struct Dataset {
  std::size_t classes = 0;
  std::size_t features = 0;
  std::vector<std::vector<double>> x;
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
};

/// Parses LIBSVM text ("label idx:val ...", 1-based indices). Blank lines and
/// '#' comments are skipped. Throws ParseError with the line number on
/// malformed input, out-of-range labels or feature indices above `features`.
Dataset ReadLibsvm(const std::string& path, std::size_t classes,
                   std::size_t features);
/// Writes nonzero entries with %.17g, so ReadLibsvm restores them exactly.
void WriteLibsvm(const Dataset& data, const std::string& path);

/// Gaussian blobs: class centres ~ N(0, separation^2 I), examples are centre
/// plus N(0, I); labels cycle 1..classes.
Dataset GenerateBlobs(std::size_t classes, std::size_t features,
                      std::size_t examples, std::uint64_t seed,
                      double separation = 1.0);

enum class SplitPolicy { kByLabel, kRandom };

/// One node's share: row-major m x (l + 1) matrix with a trailing bias 1.
struct LogRegNode {
  std::vector<double> a;
  std::vector<int> labels;
  std::size_t rows() const { return labels.size(); }
};

struct LogRegTask {
  std::size_t classes = 0;
  std::size_t features = 0;
  double reg = 1e-3;
  std::vector<LogRegNode> nodes;

  /// (features + 1) * classes.
  std::size_t dim() const { return (features + 1) * classes; }
};

/// Distributes a dataset over `n` nodes and appends the bias column.
/// kByLabel stably sorts by label; with n <= classes node (label-1) mod n
/// receives every example of that label, otherwise the sorted sequence is
/// cut into n contiguous blocks. kRandom shuffles with `seed` and cuts into
/// n blocks. Throws if any node would be empty.
LogRegTask SplitDataset(const Dataset& data, std::size_t n, SplitPolicy policy,
                        std::uint64_t seed, double reg);

LogRegTask LoadLibsvm(const std::string& path, std::size_t classes,
                      std::size_t features, std::size_t n, SplitPolicy policy,
                      std::uint64_t seed, double reg);

/// Nonconvex multiclass logistic regression:
/// f_i(x) = -(1/m_i) sum_j log softmax(A_i x)_{y_ij} + reg * sum z^2/(1+z^2),
/// where the regulariser runs over the weights (not the bias terms). The
/// parameter vector is class-major: x[y * (l+1) + k].
class LogRegProblem : public Problem {
 public:
  explicit LogRegProblem(LogRegTask task);

  std::string name() const override { return "logreg"; }
  std::size_t dim() const override { return task_.dim(); }
  std::size_t nodes() const override { return task_.nodes.size(); }
  DenseVector x0() const override { return DenseVector(dim()); }

  double NodeValue(std::size_t i, const DenseVector& x) const override;
  DenseVector NodeGradient(std::size_t i, const DenseVector& x) const override;

  /// Loss and gradient over an index multiset (empty span = full node data).
  std::pair<double, DenseVector> ValueAndGradient(
      std::size_t i, const DenseVector& x,
      std::span<const std::uint32_t> batch) const;

  Sample DrawSample(std::size_t i, std::size_t batch,
                    RngStream& rng) const override;
  DenseVector StochasticGradient(std::size_t i, const DenseVector& x,
                                 const Sample& sample) const override;

  /// Upper bounds: L_i = ||A_i^T A_i|| / (2 m_i) + 2 reg,
  /// ell_i = max_j ||a_ij||^2 / 2 + 2 reg, and L from the pooled
  /// (1/n) sum_i A_i^T A_i / m_i.
  SmoothnessInfo Smoothness() const override { return smoothness_; }

  const LogRegTask& task() const { return task_; }

 private:
  void Accumulate(const LogRegNode& node, std::size_t row, const DenseVector& x,
                  double weight, double* loss, DenseVector* grad,
                  std::vector<double>& scratch) const;
  void AddRegularizer(const DenseVector& x, double* loss, DenseVector* grad) const;

  LogRegTask task_;
  SmoothnessInfo smoothness_;
};

/// h(z) = z^2 / (1 + z^2) and its derivative 2z / (1 + z^2)^2.
double NonconvexReg(double z);
double NonconvexRegGrad(double z);

}  // namespace efsim
