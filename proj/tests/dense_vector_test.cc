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

#include "efsim/dense_vector.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "efsim/error.hpp"
#include "efsim/rng.hpp"
#include "gtest/gtest.h"

namespace efsim {
namespace {

DenseVector RandomVector(std::size_t d, std::uint64_t seed) {
  RngStream rng(seed, 0, 0, StreamPurpose::kAuxiliary);
  DenseVector v(d);
  for (auto& x : v) x = rng.NextGaussian();
  return v;
}

long double OracleDot(const DenseVector& a, const DenseVector& b) {
  long double s = 0.0L;
  for (std::size_t j = 0; j < a.dim(); ++j) {
    s += static_cast<long double>(a[j]) * static_cast<long double>(b[j]);
  }
  return s;
}

TEST(DenseVectorTest, DotMatchesExtendedPrecisionOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const DenseVector a = RandomVector(37 + seed, seed);
    const DenseVector b = RandomVector(37 + seed, seed + 100);
    const long double expect = OracleDot(a, b);
    EXPECT_NEAR(Dot(a, b), static_cast<double>(expect), 1e-12 * (1.0 + std::abs(expect)));
    EXPECT_NEAR(NormSq(a), static_cast<double>(OracleDot(a, a)), 1e-12 * NormSq(a));
    EXPECT_DOUBLE_EQ(Norm(a), std::sqrt(NormSq(a)));
  }
}

TEST(DenseVectorTest, DotIsSymmetricBitwise) {
  const DenseVector a = RandomVector(50, 1);
  const DenseVector b = RandomVector(50, 2);
  EXPECT_EQ(Dot(a, b), Dot(b, a));
}

TEST(DenseVectorTest, CauchySchwarz) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const DenseVector a = RandomVector(10, seed);
    const DenseVector b = RandomVector(10, seed + 50);
    EXPECT_LE(std::abs(Dot(a, b)), Norm(a) * Norm(b) * (1 + 1e-15));
  }
}

TEST(DenseVectorTest, ArithmeticMatchesElementwise) {
  const DenseVector a = RandomVector(8, 3);
  const DenseVector b = RandomVector(8, 4);
  const DenseVector sum = a + b;
  const DenseVector diff = a - b;
  const DenseVector scaled = 2.5 * a;
  DenseVector y = b;
  Axpy(-0.75, a, y);
  for (std::size_t j = 0; j < a.dim(); ++j) {
    EXPECT_EQ(sum[j], a[j] + b[j]);
    EXPECT_EQ(diff[j], a[j] - b[j]);
    EXPECT_EQ(scaled[j], 2.5 * a[j]);
    EXPECT_EQ(y[j], b[j] + -0.75 * a[j]);
  }
}

TEST(DenseVectorTest, MeanAccumulatesInOrder) {
  std::vector<DenseVector> vs = {DenseVector{1.0, 2.0}, DenseVector{3.0, -2.0},
                                 DenseVector{5.0, 3.0}};
  const DenseVector m = Mean(vs);
  EXPECT_DOUBLE_EQ(m[0], 3.0);
  EXPECT_DOUBLE_EQ(m[1], 1.0);
}

TEST(DenseVectorTest, DimensionMismatchThrows) {
  DenseVector a(3);
  const DenseVector b(4);
  EXPECT_THROW(Dot(a, b), DimensionMismatch);
  EXPECT_THROW(a += b, DimensionMismatch);
  EXPECT_THROW(Axpy(1.0, b, a), DimensionMismatch);
  try {
    RequireSameDim(a, b, "test");
    FAIL();
  } catch (const DimensionMismatch& e) {
    EXPECT_EQ(e.expected(), 3u);
    EXPECT_EQ(e.actual(), 4u);
  }
}

TEST(DenseVectorTest, RequireFiniteReportsRound) {
  DenseVector v{1.0, std::numeric_limits<double>::infinity()};
  EXPECT_FALSE(v.AllFinite());
  try {
    RequireFinite(v, "x", 12);
    FAIL();
  } catch (const NumericFailure& e) {
    EXPECT_EQ(e.round(), 12);
  }
  v[1] = 0.0;
  EXPECT_NO_THROW(RequireFinite(v, "x"));
}

TEST(DenseVectorTest, EqualityIsExact) {
  DenseVector a{0.1, 0.2};
  DenseVector b{0.1, 0.2};
  EXPECT_TRUE(a == b);
  b[1] = std::nextafter(0.2, 1.0);
  EXPECT_FALSE(a == b);
  EXPECT_FALSE(DenseVector{std::nan("")} == DenseVector{std::nan("")});
}

}  // namespace
}  // namespace efsim
