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

#include "efsim/logreg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "efsim/error.hpp"
#include "efsim/linalg.hpp"
#include "efsim/rng.hpp"

namespace efsim {

namespace {

bool ParseInt(const std::string& s, long long* out) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size() || v != std::floor(v)) return false;
    *out = static_cast<long long>(v);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

Dataset ReadLibsvm(const std::string& path, std::size_t classes,
                   std::size_t features) {
  if (classes < 2) throw InvalidArgument("logistic regression needs >= 2 classes");
  if (features < 1) throw InvalidArgument("feature dimension must be positive");
  std::ifstream in(path);
  if (!in) throw Error("cannot open LIBSVM file '" + path + "'");
  Dataset data;
  data.classes = classes;
  data.features = features;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ss(line);
    std::string tok;
    if (!(ss >> tok)) continue;
    long long label = 0;
    if (!ParseInt(tok, &label)) throw ParseError("bad label '" + tok + "'", line_no);
    if (label < 1 || label > static_cast<long long>(classes)) {
      throw ParseError("label " + tok + " outside [1, " + std::to_string(classes) + "]",
                       line_no);
    }
    std::vector<double> row(features, 0.0);
    while (ss >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size()) {
        throw ParseError("malformed feature '" + tok + "'", line_no);
      }
      long long idx = 0;
      if (!ParseInt(tok.substr(0, colon), &idx) || idx < 1) {
        throw ParseError("bad feature index in '" + tok + "'", line_no);
      }
      if (idx > static_cast<long long>(features)) {
        throw ParseError("feature index " + std::to_string(idx) + " exceeds " +
                             std::to_string(features),
                         line_no);
      }
      double val = 0.0;
      try {
        std::size_t pos = 0;
        const std::string v = tok.substr(colon + 1);
        val = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
      } catch (const std::exception&) {
        throw ParseError("bad feature value in '" + tok + "'", line_no);
      }
      if (!std::isfinite(val)) throw ParseError("non-finite feature value", line_no);
      row[static_cast<std::size_t>(idx - 1)] = val;
    }
    data.x.push_back(std::move(row));
    data.labels.push_back(static_cast<int>(label));
  }
  if (data.size() == 0) throw ParseError("LIBSVM file has no examples", line_no);
  return data;
}

void WriteLibsvm(const Dataset& data, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw Error("cannot open '" + tmp + "' for writing");
    char buf[40];
    for (std::size_t r = 0; r < data.size(); ++r) {
      out << data.labels[r];
      for (std::size_t k = 0; k < data.x[r].size(); ++k) {
        if (data.x[r][k] == 0.0) continue;
        std::snprintf(buf, sizeof buf, "%.17g", data.x[r][k]);
        out << ' ' << (k + 1) << ':' << buf;
      }
      out << '\n';
    }
    if (!out) throw Error("write to '" + tmp + "' failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw Error("cannot rename '" + tmp + "' to '" + path + "'");
  }
}

Dataset GenerateBlobs(std::size_t classes, std::size_t features,
                      std::size_t examples, std::uint64_t seed,
                      double separation) {
  if (classes < 2 || features < 1 || examples < 1) {
    throw InvalidArgument("blobs need classes >= 2, features >= 1, examples >= 1");
  }
  RngStream rng(seed, 0, 0, StreamPurpose::kAuxiliary);
  std::vector<std::vector<double>> centres(classes, std::vector<double>(features));
  for (auto& c : centres) {
    for (auto& v : c) v = separation * rng.NextGaussian();
  }
  Dataset data;
  data.classes = classes;
  data.features = features;
  for (std::size_t r = 0; r < examples; ++r) {
    const std::size_t y = r % classes;
    std::vector<double> row(features);
    for (std::size_t k = 0; k < features; ++k) row[k] = centres[y][k] + rng.NextGaussian();
    data.x.push_back(std::move(row));
    data.labels.push_back(static_cast<int>(y + 1));
  }
  return data;
}

LogRegTask SplitDataset(const Dataset& data, std::size_t n, SplitPolicy policy,
                        std::uint64_t seed, double reg) {
  if (n < 1) throw InvalidArgument("SplitDataset: n must be >= 1");
  if (!(reg >= 0.0)) throw InvalidArgument("SplitDataset: reg must be >= 0");
  const std::size_t m = data.size();
  if (m < n) throw InvalidArgument("fewer examples than nodes");
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::size_t> owner(m);

  if (policy == SplitPolicy::kByLabel) {
    std::stable_sort(order.begin(), order.end(), [&data](std::size_t a, std::size_t b) {
      return data.labels[a] < data.labels[b];
    });
  } else {
    RngStream rng(seed, 0, 0, StreamPurpose::kAuxiliary);
    for (std::size_t i = m; i > 1; --i) {
      std::swap(order[i - 1], order[rng.NextBelow(i)]);
    }
  }
  if (policy == SplitPolicy::kByLabel && n <= data.classes) {
    for (std::size_t p = 0; p < m; ++p) {
      owner[p] = static_cast<std::size_t>(data.labels[order[p]] - 1) % n;
    }
  } else {
    for (std::size_t p = 0; p < m; ++p) owner[p] = p * n / m;
  }

  LogRegTask task;
  task.classes = data.classes;
  task.features = data.features;
  task.reg = reg;
  task.nodes.resize(n);
  const std::size_t width = data.features + 1;
  for (std::size_t p = 0; p < m; ++p) {
    const std::size_t r = order[p];
    if (data.labels[r] < 1 || data.labels[r] > static_cast<int>(data.classes)) {
      throw InvalidArgument("label out of range in dataset");
    }
    auto& node = task.nodes[owner[p]];
    node.a.insert(node.a.end(), data.x[r].begin(), data.x[r].end());
    node.a.push_back(1.0);
    node.labels.push_back(data.labels[r]);
    if (node.a.size() != node.labels.size() * width) {
      throw DimensionMismatch(data.features, data.x[r].size(), "dataset row");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (task.nodes[i].rows() == 0) {
      throw InvalidArgument("split leaves node " + std::to_string(i) + " empty");
    }
  }
  return task;
}

LogRegTask LoadLibsvm(const std::string& path, std::size_t classes,
                      std::size_t features, std::size_t n, SplitPolicy policy,
                      std::uint64_t seed, double reg) {
  return SplitDataset(ReadLibsvm(path, classes, features), n, policy, seed, reg);
}

double NonconvexReg(double z) { return z * z / (1.0 + z * z); }

double NonconvexRegGrad(double z) {
  const double q = 1.0 + z * z;
  return 2.0 * z / (q * q);
}

namespace {

// v -> (1/m) A^T A v over the node rows.
DenseVector GramApply(const LogRegNode& node, std::size_t width, const DenseVector& v) {
  DenseVector out(width);
  const std::size_t m = node.rows();
  for (std::size_t r = 0; r < m; ++r) {
    const double* a = node.a.data() + r * width;
    double s = 0.0;
    for (std::size_t k = 0; k < width; ++k) s += a[k] * v[k];
    for (std::size_t k = 0; k < width; ++k) out[k] += s * a[k];
  }
  out *= 1.0 / static_cast<double>(m);
  return out;
}

}  // namespace

LogRegProblem::LogRegProblem(LogRegTask task) : task_(std::move(task)) {
  if (task_.nodes.empty()) throw InvalidArgument("logistic task has no nodes");
  if (task_.classes < 2) throw InvalidArgument("logistic task needs >= 2 classes");
  const std::size_t width = task_.features + 1;
  for (const auto& node : task_.nodes) {
    if (node.rows() == 0) throw InvalidArgument("logistic task has an empty node");
    if (node.a.size() != node.rows() * width) {
      throw DimensionMismatch(node.rows() * width, node.a.size(), "logistic node");
    }
    for (int y : node.labels) {
      if (y < 1 || y > static_cast<int>(task_.classes)) {
        throw InvalidArgument("logistic label out of range");
      }
    }
  }
  const double reg_curv = 2.0 * task_.reg;
  constexpr double kTol = 1e-10;
  constexpr std::size_t kMaxIter = 20000;
  double ell_sq = 0.0;
  for (const auto& node : task_.nodes) {
    const auto gram = PowerIterationSpectralNorm(
        [&](const DenseVector& v) { return GramApply(node, width, v); }, width, kTol,
        kMaxIter);
    smoothness_.L_i.push_back(gram.value / 2.0 + reg_curv);
    double max_row = 0.0;
    for (std::size_t r = 0; r < node.rows(); ++r) {
      double s = 0.0;
      for (std::size_t k = 0; k < width; ++k) s += node.a[r * width + k] * node.a[r * width + k];
      max_row = std::max(max_row, s);
    }
    const double ell = max_row / 2.0 + reg_curv;
    ell_sq += ell * ell;
  }
  const double inv_n = 1.0 / static_cast<double>(task_.nodes.size());
  const auto pooled = PowerIterationSpectralNorm(
      [&](const DenseVector& v) {
        DenseVector out(width);
        for (const auto& node : task_.nodes) out += GramApply(node, width, v);
        out *= inv_n;
        return out;
      },
      width, kTol, kMaxIter);
  smoothness_.L = pooled.value / 2.0 + reg_curv;
  smoothness_.FinalizeTilde();
  smoothness_.ell_tilde = std::sqrt(ell_sq * inv_n);
  smoothness_.upper_bound = true;
}

void LogRegProblem::Accumulate(const LogRegNode& node, std::size_t row,
                               const DenseVector& x, double weight, double* loss,
                               DenseVector* grad, std::vector<double>& scratch) const {
  const std::size_t width = task_.features + 1;
  const std::size_t c = task_.classes;
  const double* a = node.a.data() + row * width;
  scratch.resize(c);
  double zmax = -INFINITY;
  for (std::size_t y = 0; y < c; ++y) {
    const double* w = x.raw().data() + y * width;
    double z = 0.0;
    for (std::size_t k = 0; k < width; ++k) z += a[k] * w[k];
    scratch[y] = z;
    zmax = std::max(zmax, z);
  }
  double denom = 0.0;
  for (std::size_t y = 0; y < c; ++y) denom += std::exp(scratch[y] - zmax);
  const std::size_t label = static_cast<std::size_t>(node.labels[row] - 1);
  if (loss != nullptr) {
    *loss += weight * (std::log(denom) + zmax - scratch[label]);
  }
  if (grad != nullptr) {
    for (std::size_t y = 0; y < c; ++y) {
      const double p = std::exp(scratch[y] - zmax) / denom;
      const double r = weight * (p - (y == label ? 1.0 : 0.0));
      double* g = grad->values().data() + y * width;
      for (std::size_t k = 0; k < width; ++k) g[k] += r * a[k];
    }
  }
}

void LogRegProblem::AddRegularizer(const DenseVector& x, double* loss,
                                   DenseVector* grad) const {
  if (task_.reg == 0.0) return;
  const std::size_t width = task_.features + 1;
  for (std::size_t y = 0; y < task_.classes; ++y) {
    for (std::size_t k = 0; k < task_.features; ++k) {
      const double z = x[y * width + k];
      if (loss != nullptr) *loss += task_.reg * NonconvexReg(z);
      if (grad != nullptr) (*grad)[y * width + k] += task_.reg * NonconvexRegGrad(z);
    }
  }
}

std::pair<double, DenseVector> LogRegProblem::ValueAndGradient(
    std::size_t i, const DenseVector& x, std::span<const std::uint32_t> batch) const {
  CheckNode(i);
  CheckPoint(x);
  const auto& node = task_.nodes[i];
  double loss = 0.0;
  DenseVector grad(dim());
  std::vector<double> scratch;
  if (batch.empty()) {
    const double w = 1.0 / static_cast<double>(node.rows());
    for (std::size_t r = 0; r < node.rows(); ++r) Accumulate(node, r, x, w, &loss, &grad, scratch);
  } else {
    const double w = 1.0 / static_cast<double>(batch.size());
    for (auto r : batch) {
      if (r >= node.rows()) throw InvalidArgument("batch index out of range");
      Accumulate(node, r, x, w, &loss, &grad, scratch);
    }
  }
  AddRegularizer(x, &loss, &grad);
  return {loss, std::move(grad)};
}

double LogRegProblem::NodeValue(std::size_t i, const DenseVector& x) const {
  CheckNode(i);
  CheckPoint(x);
  const auto& node = task_.nodes[i];
  double loss = 0.0;
  std::vector<double> scratch;
  const double w = 1.0 / static_cast<double>(node.rows());
  for (std::size_t r = 0; r < node.rows(); ++r) Accumulate(node, r, x, w, &loss, nullptr, scratch);
  AddRegularizer(x, &loss, nullptr);
  return loss;
}

DenseVector LogRegProblem::NodeGradient(std::size_t i, const DenseVector& x) const {
  return ValueAndGradient(i, x, {}).second;
}

Sample LogRegProblem::DrawSample(std::size_t i, std::size_t batch,
                                 RngStream& rng) const {
  CheckNode(i);
  if (batch < 1) throw InvalidArgument("batch size must be >= 1");
  Sample s;
  s.batch = batch;
  s.indices.resize(batch);
  const std::size_t m = task_.nodes[i].rows();
  for (auto& idx : s.indices) idx = static_cast<std::uint32_t>(rng.NextBelow(m));
  return s;
}

DenseVector LogRegProblem::StochasticGradient(std::size_t i, const DenseVector& x,
                                              const Sample& sample) const {
  if (sample.indices.empty()) throw InvalidArgument("empty batch");
  return ValueAndGradient(i, x, sample.indices).second;
}

}  // namespace efsim
