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

#include "efsim/compressor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "efsim/error.hpp"

namespace efsim {

CompressorSpec CompressorSpec::TopK(std::size_t k, std::size_t dim) {
  CompressorSpec s{CompressorKind::kTopK, dim, k, 0.0};
  s.Validate();
  return s;
}

CompressorSpec CompressorSpec::RandK(std::size_t k, std::size_t dim) {
  CompressorSpec s{CompressorKind::kRandK, dim, k, 0.0};
  s.Validate();
  return s;
}

CompressorSpec CompressorSpec::Identity(std::size_t dim) {
  CompressorSpec s{CompressorKind::kIdentity, dim, dim, 0.0};
  s.Validate();
  return s;
}

CompressorSpec CompressorSpec::HardThreshold(double tau, std::size_t dim) {
  CompressorSpec s{CompressorKind::kHardThreshold, dim, 0, tau};
  s.Validate();
  return s;
}

void CompressorSpec::Validate() const {
  if (dim == 0) throw InvalidArgument("compressor dimension must be positive");
  switch (kind) {
    case CompressorKind::kTopK:
    case CompressorKind::kRandK:
      if (k < 1 || k > dim) {
        throw InvalidArgument("compressor k=" + std::to_string(k) +
                              " outside [1, " + std::to_string(dim) + "]");
      }
      break;
    case CompressorKind::kHardThreshold:
      if (!(threshold > 0.0) || !std::isfinite(threshold)) {
        throw InvalidArgument("hard threshold must be positive and finite");
      }
      break;
    case CompressorKind::kIdentity:
      break;
  }
}

std::string CompressorSpec::ToString() const {
  switch (kind) {
    case CompressorKind::kTopK: return "topk:" + std::to_string(k);
    case CompressorKind::kRandK: return "randk:" + std::to_string(k);
    case CompressorKind::kIdentity: return "identity";
    case CompressorKind::kHardThreshold: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "threshold:%.17g", threshold);
      return buf;
    }
  }
  return "unknown";
}

namespace {

CompressedVector Gather(const DenseVector& x, std::vector<std::uint32_t> idx) {
  std::sort(idx.begin(), idx.end());
  CompressedVector out;
  out.dim = x.dim();
  out.values.reserve(idx.size());
  for (auto j : idx) out.values.push_back(x[j]);
  out.indices = std::move(idx);
  return out;
}

CompressedVector TopKSelect(const DenseVector& x, std::size_t k) {
  const std::size_t d = x.dim();
  std::vector<std::uint32_t> order(d);
  std::iota(order.begin(), order.end(), 0u);
  if (k < d) {
    auto before = [&x](std::uint32_t a, std::uint32_t b) {
      const double fa = std::abs(x[a]);
      const double fb = std::abs(x[b]);
      return fa > fb || (fa == fb && a < b);
    };
    std::nth_element(order.begin(), order.begin() + static_cast<long>(k) - 1,
                     order.end(), before);
    order.resize(k);
  }
  return Gather(x, std::move(order));
}

CompressedVector RandKSelect(const DenseVector& x, std::size_t k,
                             RngStream& rng) {
  const std::size_t d = x.dim();
  std::vector<std::uint32_t> pool(d);
  std::iota(pool.begin(), pool.end(), 0u);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.NextBelow(d - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return Gather(x, std::move(pool));
}

}  // namespace

CompressedVector Compress(const CompressorSpec& spec, const DenseVector& x,
                          RngStream& rng) {
  if (x.dim() != spec.dim) throw DimensionMismatch(spec.dim, x.dim(), "Compress");
  switch (spec.kind) {
    case CompressorKind::kTopK:
      return TopKSelect(x, spec.k);
    case CompressorKind::kRandK:
      return RandKSelect(x, spec.k, rng);
    case CompressorKind::kIdentity: {
      CompressedVector out;
      out.dim = x.dim();
      out.indices.resize(x.dim());
      std::iota(out.indices.begin(), out.indices.end(), 0u);
      out.values = x.raw();
      return out;
    }
    case CompressorKind::kHardThreshold: {
      CompressedVector out;
      out.dim = x.dim();
      for (std::size_t j = 0; j < x.dim(); ++j) {
        if (std::abs(x[j]) >= spec.threshold) {
          out.indices.push_back(static_cast<std::uint32_t>(j));
          out.values.push_back(x[j]);
        }
      }
      return out;
    }
  }
  throw InvalidArgument("unknown compressor kind");
}

DenseVector Densify(const CompressedVector& c) {
  DenseVector out(c.dim);
  for (std::size_t i = 0; i < c.indices.size(); ++i) out[c.indices[i]] = c.values[i];
  return out;
}

void AddCompressed(const CompressedVector& c, double scale, DenseVector& y) {
  if (y.dim() != c.dim) throw DimensionMismatch(c.dim, y.dim(), "AddCompressed");
  for (std::size_t i = 0; i < c.indices.size(); ++i) {
    y[c.indices[i]] += scale * c.values[i];
  }
}

std::size_t CoordinatesSent(const CompressedVector& c) { return c.indices.size(); }

std::optional<double> ContractionAlpha(const CompressorSpec& spec) {
  switch (spec.kind) {
    case CompressorKind::kTopK:
    case CompressorKind::kRandK:
      return static_cast<double>(spec.k) / static_cast<double>(spec.dim);
    case CompressorKind::kIdentity:
      return 1.0;
    case CompressorKind::kHardThreshold:
      return std::nullopt;
  }
  return std::nullopt;
}

std::optional<double> AbsoluteDelta(const CompressorSpec& spec) {
  if (spec.kind != CompressorKind::kHardThreshold) return std::nullopt;
  return std::sqrt(static_cast<double>(spec.dim)) * spec.threshold;
}

namespace {

double ErrorSq(const CompressedVector& c, const DenseVector& x) {
  // ||C(x) - x||^2 is the squared mass of the dropped coordinates.
  double kept = 0.0;
  for (double v : c.values) kept += v * v;
  double dropped = NormSq(x) - kept;
  if (dropped < 0.0) dropped = 0.0;
  return dropped;
}

DenseVector GaussianVector(std::size_t d, double scale, RngStream& rng) {
  DenseVector x(d);
  for (std::size_t j = 0; j < d; ++j) x[j] = scale * rng.NextGaussian();
  return x;
}

}  // namespace

ContractionReport VerifyContractive(const CompressorSpec& spec,
                                    std::size_t trials, RngStream& rng) {
  if (!spec.is_contractive()) {
    throw InvalidArgument("VerifyContractive called on an absolute compressor");
  }
  if (trials == 0) throw InvalidArgument("VerifyContractive needs trials > 0");
  constexpr std::size_t kResamples = 100;
  ContractionReport report;
  report.trials = trials;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const DenseVector x = GaussianVector(spec.dim, 1.0, rng);
    const double norm_sq = NormSq(x);
    double ratio = 0.0;
    if (spec.kind == CompressorKind::kRandK) {
      for (std::size_t r = 0; r < kResamples; ++r) {
        ratio += ErrorSq(Compress(spec, x, rng), x);
      }
      ratio /= static_cast<double>(kResamples) * norm_sq;
    } else {
      const CompressedVector c = Compress(spec, x, rng);
      // Exact residual for deterministic operators (no cancellation).
      ratio = NormSq(Densify(c) - x) / norm_sq;
    }
    report.max_ratio = std::max(report.max_ratio, ratio);
    sum += ratio;
    sum_sq += ratio * ratio;
  }
  const double n = static_cast<double>(trials);
  report.mean_ratio = sum / n;
  const double var = trials > 1 ? (sum_sq - n * report.mean_ratio * report.mean_ratio) / (n - 1) : 0.0;
  report.stderr_ratio = std::sqrt(std::max(var, 0.0) / n);
  return report;
}

AbsoluteReport VerifyAbsolute(const CompressorSpec& spec, std::size_t trials,
                              double scale, RngStream& rng) {
  if (!spec.is_absolute()) {
    throw InvalidArgument("VerifyAbsolute called on a contractive compressor");
  }
  AbsoluteReport report;
  report.trials = trials;
  const double delta = *AbsoluteDelta(spec);
  report.delta_sq = delta * delta;
  for (std::size_t t = 0; t < trials; ++t) {
    const DenseVector x = GaussianVector(spec.dim, scale, rng);
    const double err = NormSq(Densify(Compress(spec, x, rng)) - x);
    report.max_error_sq = std::max(report.max_error_sq, err);
    if (err > report.delta_sq) ++report.violations;
  }
  return report;
}

}  // namespace efsim
