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

enum class CompressorKind { kTopK, kRandK, kIdentity, kHardThreshold };

/// Description of a compression operator C: R^d -> R^d.
///
/// TopK and RandK (unscaled) are contractive with alpha = k/d, Identity with
/// alpha = 1. HardThreshold is absolute: its error is bounded by a constant
/// Delta^2 rather than by a fraction of ||x||^2.
struct CompressorSpec {
  CompressorKind kind = CompressorKind::kIdentity;
  std::size_t dim = 0;
  std::size_t k = 0;       // TopK / RandK
  double threshold = 0.0;  // HardThreshold

  static CompressorSpec TopK(std::size_t k, std::size_t dim);
  static CompressorSpec RandK(std::size_t k, std::size_t dim);
  static CompressorSpec Identity(std::size_t dim);
  static CompressorSpec HardThreshold(double tau, std::size_t dim);

  /// Throws InvalidArgument when the invariants (1 <= k <= d, tau > 0) fail.
  void Validate() const;
  bool is_contractive() const { return kind != CompressorKind::kHardThreshold; }
  bool is_absolute() const { return kind == CompressorKind::kHardThreshold; }
  std::string ToString() const;
};

/// Sparse output of a compressor: strictly increasing indices in [0, dim).
struct CompressedVector {
  std::vector<std::uint32_t> indices;
  std::vector<double> values;
  std::size_t dim = 0;
};

/// Applies the operator. TopK keeps the k largest |x_j| (ties broken by the
/// lower index); RandK keeps k coordinates drawn uniformly without
/// replacement and does not rescale them.
CompressedVector Compress(const CompressorSpec& spec, const DenseVector& x,
                          RngStream& rng);

DenseVector Densify(const CompressedVector& c);

/// y <- y + scale * c
void AddCompressed(const CompressedVector& c, double scale, DenseVector& y);

std::size_t CoordinatesSent(const CompressedVector& c);

/// Modelled wire size: a 32-bit index plus a 64-bit value per coordinate.
inline constexpr std::size_t kBitsPerCoordinate = 32 + 64;
inline std::size_t BitsSent(const CompressedVector& c) {
  return CoordinatesSent(c) * kBitsPerCoordinate;
}

/// k/d for TopK and RandK, 1 for Identity, nullopt for absolute compressors.
std::optional<double> ContractionAlpha(const CompressorSpec& spec);

/// sqrt(d) * tau for HardThreshold (every dropped entry is below tau in
/// magnitude), nullopt otherwise.
std::optional<double> AbsoluteDelta(const CompressorSpec& spec);

struct ContractionReport {
  double max_ratio = 0.0;
  double mean_ratio = 0.0;
  double stderr_ratio = 0.0;
  std::size_t trials = 0;
};

/// Empirical ||C(x) - x||^2 / ||x||^2 over standard Gaussian draws. RandK
/// ratios are averaged over 100 resamplings of the mask per x.
ContractionReport VerifyContractive(const CompressorSpec& spec,
                                    std::size_t trials, RngStream& rng);

struct AbsoluteReport {
  double max_error_sq = 0.0;
  double delta_sq = 0.0;
  std::size_t violations = 0;
  std::size_t trials = 0;
};

/// Empirical ||C(x) - x||^2 against Delta^2 for Gaussian draws scaled by
/// `scale` (so that a fraction of entries falls below the threshold).
AbsoluteReport VerifyAbsolute(const CompressorSpec& spec, std::size_t trials,
                              double scale, RngStream& rng);

}  // namespace efsim
