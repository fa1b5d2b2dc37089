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
#include <string_view>
#include <vector>

#include "efsim/compressor.hpp"
#include "efsim/dense_vector.hpp"
#include "efsim/problem.hpp"

namespace efsim {

enum class AlgorithmKind {
  kSGD,
  kSGDM,
  kEF14SGD,
  kEF21SGD,
  kEF21SGDM,
  kEF21SGD2M,
  kEF21SGDM_ABS,
  kEF21STORM,
  kEF21SGD_IDEAL,
  kEF21SGDM_IDEAL,
};

/// Canonical upper-case tag, e.g. "EF21SGDM".
std::string AlgorithmName(AlgorithmKind kind);
/// Accepts the canonical tag case-insensitively, with optional '-'/'_'
/// separators ("ef21-sgdm", "EF21_SGDM_ABS").
AlgorithmKind ParseAlgorithm(std::string_view text);
std::vector<AlgorithmKind> AllAlgorithms();

bool HasMomentum(AlgorithmKind kind);  // keeps v_i
bool IsIdealized(AlgorithmKind kind);

/// Throws InvalidArgument unless the compressor suits the algorithm: the
/// absolute variant needs an absolute compressor, SGD/SGDM need Identity,
/// every other kind needs a contractive compressor.
void CheckCompatible(AlgorithmKind kind, const CompressorSpec& compressor);

enum class Schedule { kConstant, kInvSqrtT, kInvSqrtBigT };

std::string ScheduleName(Schedule s);
Schedule ParseSchedule(std::string_view text);

/// Step size and momentum. Under kConstant gamma_t = gamma and eta_t = eta.
/// Under kInvSqrtT eta_t = eta / sqrt(t + 1) and under kInvSqrtBigT
/// eta_t = eta / sqrt(T); both use gamma_t = gamma * eta_t.
struct HyperParams {
  double gamma = 0.0;
  double eta = 1.0;
  std::size_t batch = 1;
  std::size_t batch_init = 1;
  std::size_t rounds = 0;
  Schedule schedule = Schedule::kConstant;

  double GammaAt(std::size_t t) const;
  double EtaAt(std::size_t t) const;
  void Validate() const;
};

/// Per-node state; only the fields used by the algorithm are engaged.
struct NodeState {
  DenseVector g;
  std::optional<DenseVector> v;
  std::optional<DenseVector> u;
  std::optional<DenseVector> w;
  std::optional<DenseVector> e;
  std::optional<DenseVector> x_prev;
  /// EF14: stochastic gradient drawn at the current iterate.
  std::optional<DenseVector> s_cached;
};

struct ServerState {
  DenseVector x;
  DenseVector g;
  std::size_t t = 0;
};

struct AlgorithmState {
  AlgorithmKind kind = AlgorithmKind::kEF21SGDM;
  std::uint64_t seed = 0;
  ServerState server;
  std::vector<NodeState> nodes;
};

struct RoundLog {
  std::size_t coords_sent = 0;
  /// Stochastic gradient evaluations per node.
  std::size_t samples = 0;
};

/// Builds round-0 state: v_i = g_i = B_init mini-batch gradient at x0
/// (u_i = v_i, w_i = g_i where used). EF14 starts from e_i = g_i = 0 with a
/// batch-B gradient cached at x0. Draws come from stream (seed, i, 0).
AlgorithmState Init(AlgorithmKind kind, const Problem& problem,
                    const HyperParams& params, const CompressorSpec& compressor,
                    std::uint64_t seed, RoundLog* log = nullptr);

/// Executes round t -> t+1 with streams (seed, i, t + 1). The aggregate g is
/// recomputed as (1/n) sum g_i in ascending node order. Throws
/// NumericFailure carrying t + 1 if an iterate or estimator is non-finite.
RoundLog Round(AlgorithmState& state, const Problem& problem,
               const HyperParams& params, const CompressorSpec& compressor);

/// w_new = s_new + (1 - eta) (w - s_old).
DenseVector StormUpdate(const DenseVector& w, const DenseVector& s_new,
                        const DenseVector& s_old, double eta);

/// x - (1/n) sum_i e_i for EF14 states.
DenseVector VirtualIterate(const AlgorithmState& state);

/// Inputs to the parameter formulas.
struct TheoryInputs {
  SmoothnessInfo smoothness;
  std::optional<double> alpha;  // contractive compressors
  std::optional<double> delta;  // absolute compressors
  double sigma = 0.0;
  std::size_t n = 1;
  std::size_t T = 1;
  double delta0 = 0.0;
};

/// Step size, momentum and initial batch prescribed by the convergence
/// theorems: EF21SGDM (single-node and distributed), EF21SGD2M,
/// EF21SGDM_ABS, EF21STORM, and SGDM with the parameter-free 1/sqrt(t+1)
/// momentum. `base` supplies batch, rounds and schedule. Throws when the
/// kind has no such result or a required constant is missing.
HyperParams TheoreticalParams(AlgorithmKind kind, const TheoryInputs& in,
                              const HyperParams& base);

}  // namespace efsim
