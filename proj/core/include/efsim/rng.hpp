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
#include <cstdint>

namespace efsim {

/// Philox4x32-10 block function (Salmon et al., SC'11). Exposed for the
/// known-answer tests.
std::array<std::uint32_t, 4> Philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Stream labels. A stream identified by (seed, node, round, purpose) always
/// yields the same sequence regardless of which other streams were consumed.
enum class StreamPurpose : std::uint32_t {
  kSampling = 0,
  kCompression = 1,
  kAuxiliary = 2,
};

/// Counter-based random stream. The Philox key is the master seed and the
/// counter holds (block, purpose, node, round), so streams are independent of
/// evaluation order.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint32_t node, std::uint32_t round,
            StreamPurpose purpose = StreamPurpose::kSampling);

  std::uint64_t seed() const { return seed_; }
  std::uint32_t node() const { return node_; }
  std::uint32_t round() const { return round_; }

  /// Same (seed, node, round), different purpose, fresh position.
  RngStream Substream(StreamPurpose purpose) const;

  std::uint64_t NextU64();
  /// Uniform on the open interval (0, 1) with 53 random bits.
  double NextUniform();
  double NextGaussian();
  /// Uniform integer in [0, n); n must be positive. Unbiased (rejection).
  std::uint64_t NextBelow(std::uint64_t n);

 private:
  void Refill();

  std::uint64_t seed_;
  std::uint32_t node_;
  std::uint32_t round_;
  std::uint32_t purpose_;
  std::uint32_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_words_ = 0;
  bool has_spare_gaussian_ = false;
  double spare_gaussian_ = 0.0;
};

inline RngStream DeriveStream(std::uint64_t seed, std::uint32_t node,
                              std::uint32_t round) {
  return RngStream(seed, node, round);
}

}  // namespace efsim
