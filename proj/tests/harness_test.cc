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

#include "efsim/harness.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>

#include "efsim/counterexample.hpp"
#include "efsim/error.hpp"
#include "efsim/quadratic.hpp"
#include "gtest/gtest.h"

namespace efsim {
namespace {

std::string TempPath(const std::string& name) {
  return (std::filesystem::path(::testing::TempDir()) / name).string();
}

RunConfig QuadConfig(AlgorithmKind kind, std::size_t rounds, std::size_t every) {
  auto problem =
      std::make_shared<QuadraticProblem>(GenerateQuadratic(4, 12, 0.05, 1.0, 2), 0.05);
  RunConfig cfg;
  cfg.problem = problem;
  cfg.algorithm = kind;
  cfg.compressor = CompressorSpec::TopK(3, problem->dim());
  cfg.params.gamma = 0.05;
  cfg.params.eta = 0.2;
  cfg.params.batch = 1;
  cfg.params.batch_init = 1;
  cfg.params.rounds = rounds;
  cfg.metric_every = every;
  return cfg;
}

TEST(QuantileTest, LinearInterpolation) {
  const std::vector<double> v{4.0, 1.0, 3.0, 2.0};
  EXPECT_DOUBLE_EQ(Quantile(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(Quantile(v, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(Quantile(v, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(Quantile(v, 0.75), 3.25);
  EXPECT_DOUBLE_EQ(Quantile(v, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(Quantile({7.0}, 0.3), 7.0);
  EXPECT_THROW(Quantile({}, 0.5), InvalidArgument);
}

TEST(RunTest, RecordsScheduledRows) {
  const RunConfig cfg = QuadConfig(AlgorithmKind::kEF21SGDM, 23, 5);
  const RunTrace tr = efsim::Run(cfg, 0);
  std::vector<std::size_t> ts;
  for (const auto& r : tr.rows) ts.push_back(r.t);
  EXPECT_EQ(ts, (std::vector<std::size_t>{0, 5, 10, 15, 20, 23}));
  EXPECT_EQ(tr.rows.front().coords_cum, 0u);
  EXPECT_EQ(tr.rows.back().coords_cum, 4u * 3u * 23u);
  EXPECT_EQ(tr.rows.back().samples_cum, 1u + 23u);
  EXPECT_FALSE(tr.diverged());
  EXPECT_FALSE(tr.shifted);
  EXPECT_FALSE(tr.rows.front().lyapunov.has_value());
}

TEST(RunTest, MetricEveryDoesNotChangeTrajectory) {
  const RunTrace a = efsim::Run(QuadConfig(AlgorithmKind::kEF21STORM, 60, 1), 4);
  const RunTrace b = efsim::Run(QuadConfig(AlgorithmKind::kEF21STORM, 60, 7), 4);
  for (const auto& rb : b.rows) {
    const auto& ra = a.rows[rb.t];
    ASSERT_EQ(ra.t, rb.t);
    EXPECT_EQ(ra.grad_norm, rb.grad_norm);
    EXPECT_EQ(ra.obj_gap, rb.obj_gap);
    EXPECT_EQ(ra.coords_cum, rb.coords_cum);
  }
}

TEST(RunTest, ObjectiveGapIsNonnegativeForConvexQuadratic) {
  const RunTrace tr = efsim::Run(QuadConfig(AlgorithmKind::kEF21SGDM, 100, 10), 1);
  for (const auto& r : tr.rows) EXPECT_GE(r.obj_gap, 0.0);
  EXPECT_LT(tr.rows.back().obj_gap, tr.rows.front().obj_gap);
}

TEST(RunTest, DivergenceTruncatesTrace) {
  RunConfig cfg = QuadConfig(AlgorithmKind::kEF21SGD, 400, 1);
  cfg.params.gamma = 50.0;
  const RunTrace tr = efsim::Run(cfg, 0);
  ASSERT_TRUE(tr.diverged());
  EXPECT_LT(tr.rows.size(), 401u);
  EXPECT_FALSE(tr.failure_reason.empty());
}

TEST(RunTest, LyapunovRequiresMomentum) {
  RunConfig cfg = QuadConfig(AlgorithmKind::kEF21SGD, 10, 1);
  cfg.lyapunov = true;
  EXPECT_THROW(efsim::Run(cfg, 0), InvalidArgument);
  cfg.algorithm = AlgorithmKind::kEF21SGDM;
  const RunTrace tr = efsim::Run(cfg, 0);
  for (const auto& r : tr.rows) EXPECT_TRUE(r.lyapunov.has_value());
}

TEST(LyapunovTest, HandComputedCase) {
  const CounterexampleProblem p(1.0, 1.0, 1, DenseVector{0.0, 0.0});
  AlgorithmState s;
  s.kind = AlgorithmKind::kEF21SGDM;
  s.server.x = DenseVector{0.0, 0.0};
  s.server.g = DenseVector{1.0, 0.0};
  NodeState node;
  node.g = DenseVector{1.0, 0.0};
  node.v = DenseVector{0.0, 0.0};
  s.nodes.push_back(node);
  // gap 0, ||g - v||^2 = 1, v equals the gradient: Lambda = gamma / alpha.
  EXPECT_DOUBLE_EQ(Lyapunov(p, s, 0.5, 0.3, 0.5), 1.0);

  // Second and third terms: v - grad f = (0, 1) at x = (0, 0).
  s.nodes[0].g = DenseVector{0.0, 1.0};
  s.nodes[0].v = DenseVector{0.0, 1.0};
  EXPECT_DOUBLE_EQ(Lyapunov(p, s, 0.5, 0.25, 0.5), 0.5 * 0.25 / 0.25 + 0.5 / 0.25);
}

TEST(RunQuantilesTest, WorkerCountDoesNotChangeResults) {
  RunConfig cfg = QuadConfig(AlgorithmKind::kEF21SGDM, 40, 10);
  cfg.seeds = {0, 1, 2, 3, 4};
  const QuantileResult a = RunQuantiles(cfg, 1);
  const QuantileResult b = RunQuantiles(cfg, 3);
  ASSERT_EQ(a.traces.size(), 5u);
  for (std::size_t k = 0; k < 5; ++k) {
    EXPECT_EQ(a.traces[k].seed, cfg.seeds[k]);
    EXPECT_EQ(a.traces[k].rows.back().grad_norm, b.traces[k].rows.back().grad_norm);
  }
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t r = 0; r < a.rows.size(); ++r) {
    EXPECT_EQ(a.rows[r].grad_norm[1], b.rows[r].grad_norm[1]);
    EXPECT_EQ(a.rows[r].count, 5u);
  }
}

TEST(TraceQuantilesTest, CountsTracesPerRow) {
  RunTrace a, b;
  for (std::size_t t : {0u, 10u, 20u}) a.rows.push_back({t, t, t, 1.0 + t, 2.0, std::nullopt});
  for (std::size_t t : {0u, 10u}) b.rows.push_back({t, t, t, 3.0 + t, 4.0, std::nullopt});
  const auto rows = TraceQuantiles({a, b});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].count, 2u);
  EXPECT_DOUBLE_EQ(rows[1].grad_norm[1], 12.0);
  EXPECT_EQ(rows[2].count, 1u);
  EXPECT_DOUBLE_EQ(rows[2].grad_norm[1], 21.0);
  EXPECT_FALSE(rows[0].lyapunov[1].has_value());
}

TEST(Theorem1Test, LowerBoundHoldsOnFewSeeds) {
  const Theorem1Report r =
      Theorem1Check(1.0, 1.0, 1e-3, 1, 1, 2000, {0, 1, 2, 3, 4}, DenseVector{0.0, -0.01});
  EXPECT_DOUBLE_EQ(r.rhs, 1e-4 / 60.0);
  EXPECT_TRUE(r.pass);
  EXPECT_GT(r.lhs, r.rhs);
  EXPECT_THROW(Theorem1Check(1.0, 1.0, 2.0, 1, 1, 10, {0}, DenseVector{0.0, -0.01}),
               InvalidArgument);
  EXPECT_THROW(Theorem1Check(1.0, 1.0, 1e-3, 1, 1, 10, {0}, DenseVector{0.0, 0.01}),
               InvalidArgument);
}

TEST(SweepTest, PicksBestNonDivergedPoint) {
  RunConfig cfg = QuadConfig(AlgorithmKind::kEF21SGDM, 200, 50);
  cfg.seeds = {0, 1};
  const SweepResult res = Sweep(cfg, -8, 6, SweepCriterion::kFinalLoss);
  ASSERT_EQ(res.table.size(), 15u);
  EXPECT_EQ(res.table.front().k, -8);
  EXPECT_DOUBLE_EQ(res.table.front().gamma, std::ldexp(1.0, -8));
  EXPECT_TRUE(res.table.back().diverged);
  const SweepPoint& best = res.best_point();
  EXPECT_FALSE(best.diverged);
  for (const auto& p : res.table) {
    if (!p.diverged) EXPECT_LE(best.score, p.score);
  }
}

TEST(SweepTest, AllDivergedThrows) {
  RunConfig cfg = QuadConfig(AlgorithmKind::kEF21SGD, 300, 50);
  EXPECT_THROW(Sweep(cfg, 8, 10, SweepCriterion::kFinalGradNorm), Error);
  EXPECT_EQ(ParseSweepCriterion("final_grad_norm"), SweepCriterion::kFinalGradNorm);
  EXPECT_EQ(SweepCriterionName(SweepCriterion::kFinalLoss), "final_loss");
  EXPECT_THROW(ParseSweepCriterion("best"), InvalidArgument);
}

TEST(TraceCsvTest, RoundTripIsBitwise) {
  RunTrace tr;
  tr.algorithm = "EF21SGDM";
  tr.rows.push_back({0, 0, 3, 0.1, 1.0 / 3.0, 2.0 / 7.0});
  tr.rows.push_back({10, 40, 13, 1e-300, 5e-17, std::nullopt});
  const std::string path = TempPath("trace.csv");
  WriteTraceCsv(tr, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, kTraceHeader);
  const RunTrace back = ReadTraceCsv(path);
  ASSERT_EQ(back.rows.size(), 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(back.rows[k].t, tr.rows[k].t);
    EXPECT_EQ(back.rows[k].coords_cum, tr.rows[k].coords_cum);
    EXPECT_EQ(back.rows[k].samples_cum, tr.rows[k].samples_cum);
    EXPECT_EQ(back.rows[k].grad_norm, tr.rows[k].grad_norm);
    EXPECT_EQ(back.rows[k].obj_gap, tr.rows[k].obj_gap);
    EXPECT_EQ(back.rows[k].lyapunov, tr.rows[k].lyapunov);
  }
}

TEST(TraceCsvTest, RejectsMalformedFiles) {
  const std::string path = TempPath("bad_trace.csv");
  std::ofstream(path) << "t,grad\n0,1\n";
  EXPECT_THROW(ReadTraceCsv(path), ParseError);
  std::ofstream(path) << kTraceHeader << "\n0,0,0,1\n";
  EXPECT_THROW(ReadTraceCsv(path), ParseError);
}

TEST(TraceCsvTest, HarnessOutputReparses) {
  const RunTrace tr = efsim::Run(QuadConfig(AlgorithmKind::kEF21SGDM, 30, 3), 2);
  const std::string path = TempPath("run.csv");
  WriteTraceCsv(tr, path);
  const RunTrace back = ReadTraceCsv(path);
  ASSERT_EQ(back.rows.size(), tr.rows.size());
  EXPECT_EQ(back.rows.back().grad_norm, tr.rows.back().grad_norm);
}

}  // namespace
}  // namespace efsim
