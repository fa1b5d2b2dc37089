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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "efsim/compressor.hpp"
#include "efsim/dense_vector.hpp"
#include "efsim/optim.hpp"
#include "efsim/problem.hpp"

namespace efsim {

struct RunConfig {
  std::shared_ptr<const Problem> problem;
  AlgorithmKind algorithm = AlgorithmKind::kEF21SGDM;
  CompressorSpec compressor;
  HyperParams params;
  std::size_t metric_every = 10;
  std::vector<std::uint64_t> seeds{0};
  bool lyapunov = false;

  void Validate() const;
};

struct MetricsRecord {
  std::size_t t = 0;
  std::uint64_t coords_cum = 0;
  std::uint64_t samples_cum = 0;
  double grad_norm = 0.0;
  /// f(x) - f* when f* is known, otherwise f(x).
  double obj_gap = 0.0;
  std::optional<double> lyapunov;
};

struct RunTrace {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::vector<MetricsRecord> rows;
  /// Set when the run stopped early; the round that failed.
  std::optional<std::size_t> failure_round;
  std::string failure_reason;
  /// f* unknown: obj_gap holds f(x) and the Lyapunov values are shifted.
  bool shifted = false;

  bool diverged() const { return failure_round.has_value(); }
};

/// Ratio above which the objective gap counts as divergence.
inline constexpr double kDivergenceFactor = 1e6;

/// Objective gap f(x) - f* (or f(x) when f* is unknown).
double ObjectiveGap(const Problem& problem, const DenseVector& x);

/// Lyapunov diagnostic
///   (f(x) - f*) + gamma/(alpha n) sum ||g_i - v_i||^2
///   + gamma eta/(alpha^2 n) sum ||v_i - grad f_i(x)||^2
///   + gamma/eta ||(1/n) sum (v_i - grad f_i(x))||^2.
/// Requires the state to carry v_i. Uses f(x) when f* is unknown.
double Lyapunov(const Problem& problem, const AlgorithmState& state, double gamma,
                double eta, double alpha);

/// The alpha used by the Lyapunov diagnostic for a compressor (1 for
/// absolute compressors, which have no contraction constant).
double LyapunovAlpha(const CompressorSpec& compressor);

/// One seeded run. Records t = 0, every metric_every rounds and the final
/// round. Metrics use full-gradient oracles only and never touch the run's
/// random streams. A non-finite state or an objective gap above
/// kDivergenceFactor * max(|gap_0|, 1e-300) truncates the trace.
RunTrace Run(const RunConfig& config, std::uint64_t seed);

struct QuantileRow {
  std::size_t t = 0;
  std::size_t count = 0;  // traces that reached this row
  double coords_cum = 0.0;
  double samples_cum = 0.0;
  double grad_norm[3] = {0, 0, 0};  // q25, median, q75
  double obj_gap[3] = {0, 0, 0};
  std::optional<double> lyapunov[3];
};

struct QuantileResult {
  std::vector<RunTrace> traces;  // in seed order
  std::vector<QuantileRow> rows;
};

/// Linear-interpolation quantile (q in [0, 1]) of unsorted values.
double Quantile(std::vector<double> values, double q);

/// Pointwise quartiles over traces; rows are aligned by t.
std::vector<QuantileRow> TraceQuantiles(const std::vector<RunTrace>& traces);

/// Runs every seed with up to `workers` threads and aggregates.
QuantileResult RunQuantiles(const RunConfig& config, std::size_t workers = 1);

struct Theorem1Report {
  double lhs = 0.0;         // mean ||grad f(x^T)||^2 over seeds
  double lhs_stderr = 0.0;
  double rhs = 0.0;         // (1/60) min{sigma^2/B, ||grad f(x0)||^2}
  bool pass = false;        // lhs >= rhs
  double margin_se() const { return lhs_stderr > 0 ? (lhs - rhs) / lhs_stderr : 0.0; }
};

/// Runs EF21SGD_IDEAL with Top1 on the two-dimensional counterexample.
/// Requires 0 < gamma <= 1/L and x0 = (0, x2) with x2 < 0.
Theorem1Report Theorem1Check(double L, double sigma, double gamma, std::size_t n,
                             std::size_t B, std::size_t T,
                             const std::vector<std::uint64_t>& seeds,
                             const DenseVector& x0, std::size_t workers = 1);

enum class SweepCriterion { kFinalLoss, kFinalGradNorm };
SweepCriterion ParseSweepCriterion(const std::string& text);
std::string SweepCriterionName(SweepCriterion c);

struct SweepPoint {
  int k = 0;
  double gamma = 0.0;
  double score = 0.0;  // mean over seeds of the final criterion value
  bool diverged = false;
};

struct SweepResult {
  std::vector<SweepPoint> table;
  std::size_t best = 0;  // index into table
  const SweepPoint& best_point() const { return table[best]; }
};

/// Evaluates gamma = 2^k for k in [k_lo, k_hi] with the template's seeds,
/// discarding a point if any seed diverged. Ties go to the smaller k.
SweepResult Sweep(const RunConfig& config_template, int k_lo, int k_hi,
                  SweepCriterion criterion, std::size_t workers = 1);

/// CSV trace with header t,coords_cum,samples_cum,grad_norm,obj_gap,lyapunov.
inline constexpr const char* kTraceHeader =
    "t,coords_cum,samples_cum,grad_norm,obj_gap,lyapunov";
void WriteTraceCsv(const RunTrace& trace, const std::string& path);
RunTrace ReadTraceCsv(const std::string& path);
void WriteQuantilesCsv(const std::vector<QuantileRow>& rows, const std::string& path);

/// Writes `contents` to path through a temporary file and rename.
void WriteFileAtomic(const std::string& path, const std::string& contents);

}  // namespace efsim
