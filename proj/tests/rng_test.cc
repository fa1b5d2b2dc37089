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

#include "efsim/rng.hpp"

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "gtest/gtest.h"

namespace efsim {
namespace {

TEST(PhiloxTest, KnownAnswerZero) {
  const auto out = Philox4x32({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out[0], 0x6627e8d5u);
  EXPECT_EQ(out[1], 0xe169c58du);
  EXPECT_EQ(out[2], 0xbc57ac4cu);
  EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(PhiloxTest, KnownAnswerAllOnes) {
  const auto out = Philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                              {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out[0], 0x408f276du);
  EXPECT_EQ(out[1], 0x41c83b0eu);
  EXPECT_EQ(out[2], 0xa20bc7c6u);
  EXPECT_EQ(out[3], 0x6d5451fdu);
}

TEST(PhiloxTest, KnownAnswerPi) {
  const auto out = Philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                              {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out[0], 0xd16cfe09u);
  EXPECT_EQ(out[1], 0x94fdccebu);
  EXPECT_EQ(out[2], 0x5001e420u);
  EXPECT_EQ(out[3], 0x24126ea1u);
}

std::vector<std::uint64_t> Draw(RngStream rng, int count) {
  std::vector<std::uint64_t> out;
  for (int i = 0; i < count; ++i) out.push_back(rng.NextU64());
  return out;
}

TEST(RngStreamTest, SameLabelsSameSequence) {
  EXPECT_EQ(Draw(RngStream(9, 3, 17), 64), Draw(RngStream(9, 3, 17), 64));
}

TEST(RngStreamTest, LabelsSeparateStreams) {
  const auto base = Draw(RngStream(9, 3, 17), 8);
  EXPECT_NE(base, Draw(RngStream(10, 3, 17), 8));
  EXPECT_NE(base, Draw(RngStream(9, 4, 17), 8));
  EXPECT_NE(base, Draw(RngStream(9, 3, 18), 8));
  EXPECT_NE(base, Draw(RngStream(9, 3, 17, StreamPurpose::kCompression), 8));
}

TEST(RngStreamTest, SubstreamIgnoresParentPosition) {
  RngStream a(5, 1, 2);
  RngStream b(5, 1, 2);
  for (int i = 0; i < 10; ++i) a.NextU64();
  EXPECT_EQ(Draw(a.Substream(StreamPurpose::kCompression), 16),
            Draw(b.Substream(StreamPurpose::kCompression), 16));
  EXPECT_EQ(Draw(a.Substream(StreamPurpose::kCompression), 16),
            Draw(RngStream(5, 1, 2, StreamPurpose::kCompression), 16));
}

TEST(RngStreamTest, DeriveStreamIsSampling) {
  EXPECT_EQ(Draw(DeriveStream(1, 2, 3), 4), Draw(RngStream(1, 2, 3), 4));
}

TEST(RngStreamTest, UniformInOpenInterval) {
  RngStream rng(1, 0, 0);
  double sum = 0.0;
  constexpr int kN = 100000;
  for (int i = 0; i < kN; ++i) {
    const double u = rng.NextUniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / kN, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / kN));
}

TEST(RngStreamTest, GaussianMoments) {
  RngStream rng(2, 0, 0);
  constexpr int kN = 200000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < kN; ++i) {
    const double z = rng.NextGaussian();
    sum += z;
    sum_sq += z * z;
  }
  EXPECT_LT(std::abs(sum / kN), 0.02);
  EXPECT_NEAR(sum_sq / kN, 1.0, 0.02);
}

TEST(RngStreamTest, NextBelowCoversRangeUniformly) {
  RngStream rng(3, 0, 0);
  constexpr int kBins = 7;
  constexpr int kN = 70000;
  std::vector<int> counts(kBins, 0);
  for (int i = 0; i < kN; ++i) {
    const auto v = rng.NextBelow(kBins);
    ASSERT_LT(v, static_cast<std::uint64_t>(kBins));
    ++counts[v];
  }
  double chi2 = 0.0;
  const double expected = static_cast<double>(kN) / kBins;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 99.9% quantile of chi-square with 6 degrees of freedom.
  EXPECT_LT(chi2, 22.46);
}

TEST(RngStreamTest, NextBelowOne) {
  RngStream rng(4, 0, 0);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(rng.NextBelow(1), 0u);
}

}  // namespace
}  // namespace efsim
