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
#include <set>
#include <vector>

#include "efsim/error.hpp"
#include "efsim/rng.hpp"
#include "gtest/gtest.h"

namespace efsim {
namespace {

DenseVector Gaussian(std::size_t d, RngStream& rng) {
  DenseVector v(d);
  for (auto& x : v) x = rng.NextGaussian();
  return v;
}

double ErrorSq(const DenseVector& x, const CompressedVector& c) {
  return NormSq(Densify(c) - x);
}

TEST(CompressorSpecTest, FactoriesValidate) {
  EXPECT_THROW(CompressorSpec::TopK(0, 5), InvalidArgument);
  EXPECT_THROW(CompressorSpec::TopK(6, 5), InvalidArgument);
  EXPECT_THROW(CompressorSpec::RandK(0, 5), InvalidArgument);
  EXPECT_THROW(CompressorSpec::HardThreshold(-1.0, 5), InvalidArgument);
  EXPECT_NO_THROW(CompressorSpec::TopK(5, 5));
  EXPECT_EQ(CompressorSpec::TopK(3, 10).ToString(), "topk:3");
  EXPECT_EQ(CompressorSpec::RandK(2, 10).ToString(), "randk:2");
  EXPECT_EQ(CompressorSpec::Identity(4).ToString(), "identity");
  EXPECT_EQ(CompressorSpec::HardThreshold(0.5, 4).ToString(), "threshold:0.5");
}

TEST(CompressorSpecTest, Constants) {
  EXPECT_DOUBLE_EQ(*ContractionAlpha(CompressorSpec::TopK(10, 100)), 0.1);
  EXPECT_DOUBLE_EQ(*ContractionAlpha(CompressorSpec::RandK(5, 100)), 0.05);
  EXPECT_DOUBLE_EQ(*ContractionAlpha(CompressorSpec::Identity(7)), 1.0);
  EXPECT_FALSE(ContractionAlpha(CompressorSpec::HardThreshold(0.1, 100)));
  EXPECT_DOUBLE_EQ(*AbsoluteDelta(CompressorSpec::HardThreshold(0.1, 100)), 1.0);
  EXPECT_FALSE(AbsoluteDelta(CompressorSpec::TopK(1, 2)));
}

// Brute force over all K-subsets: Top-K must minimise the residual.
TEST(TopKTest, GreedyIsOptimalBruteForce) {
  RngStream rng(1, 0, 0, StreamPurpose::kAuxiliary);
  for (std::size_t d = 1; d <= 6; ++d) {
    for (std::size_t k = 1; k <= d; ++k) {
      const auto spec = CompressorSpec::TopK(k, d);
      for (int trial = 0; trial < 20; ++trial) {
        const DenseVector x = Gaussian(d, rng);
        const double got = ErrorSq(x, Compress(spec, x, rng));
        double best = INFINITY;
        for (unsigned mask = 0; mask < (1u << d); ++mask) {
          if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
          double err = 0.0;
          for (std::size_t j = 0; j < d; ++j) {
            if (!(mask & (1u << j))) err += x[j] * x[j];
          }
          best = std::min(best, err);
        }
        EXPECT_NEAR(got, best, 1e-15 * (1.0 + best)) << "d=" << d << " k=" << k;
      }
    }
  }
}

TEST(TopKTest, OutputShape) {
  RngStream rng(2, 0, 0);
  const DenseVector x{0.5, -3.0, 2.0, 0.0, -2.5};
  const CompressedVector c = Compress(CompressorSpec::TopK(3, 5), x, rng);
  EXPECT_EQ(c.dim, 5u);
  EXPECT_EQ(c.indices, (std::vector<std::uint32_t>{1, 2, 4}));
  EXPECT_EQ(c.values, (std::vector<double>{-3.0, 2.0, -2.5}));
  EXPECT_EQ(CoordinatesSent(c), 3u);
  EXPECT_EQ(BitsSent(c), 3u * 96u);
}

TEST(TopKTest, TiesBreakTowardLowerIndex) {
  RngStream rng(3, 0, 0);
  const DenseVector x{1.0, -1.0, 1.0, 1.0};
  const CompressedVector c = Compress(CompressorSpec::TopK(2, 4), x, rng);
  EXPECT_EQ(c.indices, (std::vector<std::uint32_t>{0, 1}));
}

TEST(TopKTest, DoesNotConsumeRandomness) {
  RngStream a(4, 0, 0);
  RngStream b(4, 0, 0);
  Compress(CompressorSpec::TopK(2, 6), DenseVector{1, 2, 3, 4, 5, 6}, a);
  EXPECT_EQ(a.NextU64(), b.NextU64());
}

TEST(TopKTest, ContractionHoldsPerDraw) {
  RngStream rng(5, 0, 0);
  const auto spec = CompressorSpec::TopK(10, 100);
  for (int trial = 0; trial < 2000; ++trial) {
    const DenseVector x = Gaussian(100, rng);
    EXPECT_LE(ErrorSq(x, Compress(spec, x, rng)), 0.9 * NormSq(x) * (1 + 1e-15));
  }
}

TEST(RandKTest, SubsetIsUniform) {
  RngStream rng(6, 0, 0);
  const auto spec = CompressorSpec::RandK(2, 5);
  std::vector<int> counts(5, 0);
  constexpr int kN = 50000;
  const DenseVector x{1, 2, 3, 4, 5};
  for (int i = 0; i < kN; ++i) {
    const CompressedVector c = Compress(spec, x, rng);
    ASSERT_EQ(c.indices.size(), 2u);
    ASSERT_LT(c.indices[0], c.indices[1]);
    for (std::size_t j = 0; j < 2; ++j) {
      EXPECT_EQ(c.values[j], x[c.indices[j]]);
      ++counts[c.indices[j]];
    }
  }
  // Each coordinate is kept with probability k/d = 0.4.
  for (int c : counts) {
    EXPECT_NEAR(c / static_cast<double>(kN), 0.4, 4.0 * std::sqrt(0.24 / kN));
  }
}

TEST(RandKTest, ExpectedContractionIsOneMinusKOverD) {
  RngStream rng(7, 0, 0);
  const auto spec = CompressorSpec::RandK(3, 12);
  const DenseVector x = Gaussian(12, rng);
  constexpr int kN = 40000;
  double sum = 0.0;
  for (int i = 0; i < kN; ++i) sum += ErrorSq(x, Compress(spec, x, rng)) / NormSq(x);
  EXPECT_NEAR(sum / kN, 0.75, 0.01);
}

TEST(HardThresholdTest, KeepsLargeEntries) {
  RngStream rng(8, 0, 0);
  const DenseVector x{0.05, -0.2, 0.1, -0.09, 3.0};
  const CompressedVector c = Compress(CompressorSpec::HardThreshold(0.1, 5), x, rng);
  EXPECT_EQ(c.indices, (std::vector<std::uint32_t>{1, 2, 4}));
}

TEST(HardThresholdTest, ErrorBoundedByDeltaSquared) {
  RngStream rng(9, 0, 0);
  const auto spec = CompressorSpec::HardThreshold(0.3, 50);
  const double delta_sq = std::pow(*AbsoluteDelta(spec), 2);
  for (int trial = 0; trial < 1000; ++trial) {
    DenseVector x = Gaussian(50, rng);
    x *= 0.3;
    EXPECT_LE(ErrorSq(x, Compress(spec, x, rng)), delta_sq);
  }
}

TEST(IdentityTest, IsLossless) {
  RngStream rng(10, 0, 0);
  const DenseVector x = Gaussian(9, rng);
  const CompressedVector c = Compress(CompressorSpec::Identity(9), x, rng);
  EXPECT_TRUE(Densify(c) == x);
  EXPECT_EQ(CoordinatesSent(c), 9u);
}

TEST(CompressTest, DimensionMismatchThrows) {
  RngStream rng(11, 0, 0);
  EXPECT_THROW(Compress(CompressorSpec::TopK(1, 3), DenseVector(4), rng), DimensionMismatch);
}

TEST(AddCompressedTest, ScalesIntoTarget) {
  CompressedVector c{{0, 2}, {1.0, -2.0}, 3};
  DenseVector y{1.0, 1.0, 1.0};
  AddCompressed(c, 0.5, y);
  EXPECT_EQ(y, (DenseVector{1.5, 1.0, 0.0}));
}

TEST(VerifyTest, Reports) {
  RngStream rng(12, 0, 0);
  const auto top = VerifyContractive(CompressorSpec::TopK(10, 100), 500, rng);
  EXPECT_EQ(top.trials, 500u);
  EXPECT_LE(top.max_ratio, 0.9);
  EXPECT_LE(top.mean_ratio, top.max_ratio);
  const auto rand = VerifyContractive(CompressorSpec::RandK(10, 100), 500, rng);
  EXPECT_NEAR(rand.mean_ratio, 0.9, 0.01);
  EXPECT_THROW(VerifyContractive(CompressorSpec::HardThreshold(0.1, 10), 5, rng),
               InvalidArgument);
  const auto abs = VerifyAbsolute(CompressorSpec::HardThreshold(0.1, 100), 500, 0.1, rng);
  EXPECT_EQ(abs.violations, 0u);
  EXPECT_LE(abs.max_error_sq, abs.delta_sq);
  EXPECT_GT(abs.max_error_sq, 0.0);
}

}  // namespace
}  // namespace efsim
