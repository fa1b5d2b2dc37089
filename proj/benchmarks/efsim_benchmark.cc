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

#include <benchmark/benchmark.h>

#include <cstdint>

#include "efsim/compressor.hpp"
#include "efsim/logreg.hpp"
#include "efsim/optim.hpp"
#include "efsim/quadratic.hpp"
#include "efsim/rng.hpp"

namespace {

efsim::DenseVector RandomVector(std::size_t d, std::uint64_t seed) {
  efsim::RngStream rng(seed, 0, 0);
  efsim::DenseVector x(d);
  for (std::size_t j = 0; j < d; ++j) x[j] = rng.NextGaussian();
  return x;
}

void BM_TopK(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto spec = efsim::CompressorSpec::TopK(d / 100 + 1, d);
  const efsim::DenseVector x = RandomVector(d, 1);
  efsim::RngStream rng(0, 0, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(efsim::Compress(spec, x, rng));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(d));
}
BENCHMARK(BM_TopK)->RangeMultiplier(10)->Range(100, 100000);

void BM_RandK(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto spec = efsim::CompressorSpec::RandK(d / 100 + 1, d);
  const efsim::DenseVector x = RandomVector(d, 2);
  efsim::RngStream rng(0, 0, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(efsim::Compress(spec, x, rng));
  }
}
BENCHMARK(BM_RandK)->RangeMultiplier(10)->Range(100, 100000);

void BM_EF21SGDMRound(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  efsim::QuadraticProblem problem(efsim::GenerateQuadratic(20, d, 0.01, 1.0, 0), 0.01);
  efsim::HyperParams params;
  params.gamma = 0.01;
  params.eta = 0.1;
  params.rounds = 1;
  const auto spec = efsim::CompressorSpec::TopK(5, d);
  efsim::AlgorithmState s =
      efsim::Init(efsim::AlgorithmKind::kEF21SGDM, problem, params, spec, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(efsim::Round(s, problem, params, spec));
  }
}
BENCHMARK(BM_EF21SGDMRound)->Arg(100)->Arg(1000);

void BM_LogRegGradient(benchmark::State& state) {
  const efsim::Dataset data = efsim::GenerateBlobs(10, 50, 5000, 3);
  const efsim::LogRegProblem problem(
      efsim::SplitDataset(data, 10, efsim::SplitPolicy::kByLabel, 0, 1e-3));
  const efsim::DenseVector x = RandomVector(problem.dim(), 4);
  efsim::RngStream rng(0, 0, 1);
  const auto batch = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    const efsim::Sample sample = problem.DrawSample(0, batch, rng);
    benchmark::DoNotOptimize(problem.StochasticGradient(0, x, sample));
  }
}
BENCHMARK(BM_LogRegGradient)->Arg(1)->Arg(32);

}  // namespace

BENCHMARK_MAIN();
