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

#include "verify.hpp"

#include <cmath>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "efsim/compressor.hpp"
#include "efsim/counterexample.hpp"
#include "efsim/error.hpp"
#include "efsim/harness.hpp"
#include "efsim/logreg.hpp"
#include "efsim/optim.hpp"
#include "efsim/quadratic.hpp"
#include "efsim/rng.hpp"

namespace efsim::cli {

namespace {

std::string Format(const char* fmt, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, a, b, c);
  return buf;
}

// Iterates and aggregates of `rounds` rounds, starting with the initial state.
struct Trajectory {
  std::vector<DenseVector> x;
  std::vector<DenseVector> g;
};

Trajectory Trace(AlgorithmKind kind, const Problem& problem, const HyperParams& params,
                 const CompressorSpec& compressor, std::uint64_t seed, std::size_t rounds) {
  Trajectory tr;
  AlgorithmState state = Init(kind, problem, params, compressor, seed);
  tr.x.push_back(state.server.x);
  tr.g.push_back(state.server.g);
  for (std::size_t t = 0; t < rounds; ++t) {
    Round(state, problem, params, compressor);
    tr.x.push_back(state.server.x);
    tr.g.push_back(state.server.g);
  }
  return tr;
}

CheckResult CompareBitwise(const std::string& name, const Trajectory& a, const Trajectory& b) {
  for (std::size_t t = 0; t < a.x.size(); ++t) {
    if (!(a.x[t] == b.x[t]) || !(a.g[t] == b.g[t])) {
      return {name, false, "first mismatch at round " + std::to_string(t)};
    }
  }
  return {name, true, std::to_string(a.x.size() - 1) + " rounds identical"};
}

// Distributed gradient descent with the same floating-point operations as
// the server step: g = (1/n) sum_i grad f_i(x), x <- x - gamma g.
Trajectory GradientDescent(const Problem& problem, double gamma, std::size_t rounds) {
  Trajectory tr;
  DenseVector x = problem.x0();
  const double inv_n = 1.0 / static_cast<double>(problem.nodes());
  auto grad = [&](const DenseVector& at) {
    DenseVector g(problem.dim());
    for (std::size_t i = 0; i < problem.nodes(); ++i) g += problem.NodeGradient(i, at);
    g *= inv_n;
    return g;
  };
  DenseVector g = grad(x);
  tr.x.push_back(x);
  tr.g.push_back(g);
  for (std::size_t t = 0; t < rounds; ++t) {
    Axpy(-gamma, g, x);
    g = grad(x);
    tr.x.push_back(x);
    tr.g.push_back(g);
  }
  return tr;
}

std::shared_ptr<QuadraticProblem> SmallQuadratic(double sigma) {
  return std::make_shared<QuadraticProblem>(GenerateQuadratic(4, 10, 0.1, 1.0, 7), sigma);
}

}  // namespace

bool AllPass(const std::vector<CheckResult>& checks) {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

std::vector<std::string> VerifySuiteNames() {
  return {"compressors", "reductions", "theorem1", "lyapunov", "storm"};
}

std::vector<CheckResult> RunVerifySuite(const std::string& suite, std::size_t workers) {
  if (suite == "compressors") return VerifyCompressors();
  if (suite == "reductions") return VerifyReductions();
  if (suite == "theorem1") return VerifyTheorem1(workers);
  if (suite == "lyapunov") return VerifyLyapunov(workers);
  if (suite == "storm") return VerifyStorm();
  throw InvalidArgument("unknown verify suite '" + suite +
                        "' (expected compressors, reductions, theorem1, lyapunov or storm)");
}

std::vector<CheckResult> VerifyCompressors() {
  std::vector<CheckResult> out;
  constexpr std::size_t kTrials = 10000;
  {
    RngStream rng(42, 0, 0, StreamPurpose::kAuxiliary);
    const auto spec = CompressorSpec::TopK(10, 100);
    const ContractionReport r = VerifyContractive(spec, kTrials, rng);
    out.push_back({"topk_worst_case", r.max_ratio <= 0.9,
                   Format("max ratio %.6f <= 0.9 (mean %.6f)", r.max_ratio, r.mean_ratio)});
  }
  {
    RngStream rng(43, 0, 0, StreamPurpose::kAuxiliary);
    const auto spec = CompressorSpec::TopK(1, 2);
    const ContractionReport r = VerifyContractive(spec, kTrials, rng);
    out.push_back({"top1_d2_worst_case", r.max_ratio <= 0.5,
                   Format("max ratio %.6f <= 0.5", r.max_ratio)});
  }
  {
    RngStream rng(44, 0, 0, StreamPurpose::kAuxiliary);
    const auto spec = CompressorSpec::RandK(10, 100);
    const ContractionReport r = VerifyContractive(spec, kTrials, rng);
    out.push_back({"randk_mean_ratio", std::abs(r.mean_ratio - 0.9) <= 0.01,
                   Format("mean ratio %.6f (stderr %.2g), target 0.9 +- 0.01", r.mean_ratio,
                          r.stderr_ratio)});
  }
  {
    RngStream rng(45, 0, 0, StreamPurpose::kAuxiliary);
    const auto spec = CompressorSpec::HardThreshold(0.1, 100);
    const AbsoluteReport r = VerifyAbsolute(spec, kTrials, 0.1, rng);
    out.push_back({"threshold_error_bound", r.violations == 0 && r.max_error_sq <= r.delta_sq,
                   Format("max error^2 %.6g <= Delta^2 %.6g, violations %.0f", r.max_error_sq,
                          r.delta_sq, static_cast<double>(r.violations))});
  }
  return out;
}

std::vector<CheckResult> VerifyReductions() {
  constexpr std::size_t kRounds = 100;
  constexpr std::uint64_t kSeed = 11;
  std::vector<CheckResult> out;
  const auto noisy = SmallQuadratic(0.3);
  const auto top2 = CompressorSpec::TopK(2, noisy->dim());
  const auto ident = CompressorSpec::Identity(noisy->dim());
  HyperParams p;
  p.gamma = 0.05;
  p.eta = 1.0;
  p.batch = 2;
  p.batch_init = 3;
  p.rounds = kRounds;

  auto pair = [&](const std::string& name, AlgorithmKind a, AlgorithmKind b,
                  const CompressorSpec& c) {
    out.push_back(CompareBitwise(name, Trace(a, *noisy, p, c, kSeed, kRounds),
                                 Trace(b, *noisy, p, c, kSeed, kRounds)));
  };
  pair("EF21SGDM(eta=1)==EF21SGD", AlgorithmKind::kEF21SGDM, AlgorithmKind::kEF21SGD, top2);
  pair("EF21SGD2M(eta=1)==EF21SGD", AlgorithmKind::kEF21SGD2M, AlgorithmKind::kEF21SGD, top2);
  pair("EF21SGDM_IDEAL(eta=1)==EF21SGD_IDEAL", AlgorithmKind::kEF21SGDM_IDEAL,
       AlgorithmKind::kEF21SGD_IDEAL, top2);
  pair("SGDM(eta=1)==SGD", AlgorithmKind::kSGDM, AlgorithmKind::kSGD, ident);

  const auto exact = SmallQuadratic(0.0);
  const Trajectory gd = GradientDescent(*exact, p.gamma, kRounds);
  for (AlgorithmKind kind : {AlgorithmKind::kEF21SGDM, AlgorithmKind::kEF21SGD,
                             AlgorithmKind::kEF21STORM, AlgorithmKind::kSGD}) {
    out.push_back(CompareBitwise("sigma=0,identity: " + AlgorithmName(kind) + "==GD",
                                 Trace(kind, *exact, p, ident, kSeed, kRounds), gd));
  }
  {
    HyperParams q = p;
    q.eta = 0.5;
    const Trajectory tr = Trace(AlgorithmKind::kEF21STORM, *exact, q, ident, kSeed, kRounds);
    double worst = 0.0;
    for (std::size_t t = 0; t < tr.x.size(); ++t) {
      worst = std::max(worst, Norm(tr.x[t] - gd.x[t]) / (1.0 + Norm(gd.x[t])));
    }
    out.push_back({"sigma=0,identity: EF21STORM(eta=0.5)~GD", worst <= 1e-10,
                   Format("max relative deviation %.3g <= 1e-10", worst)});
  }

  {
    HyperParams q = p;
    q.gamma = 0.02;
    AlgorithmState state = Init(AlgorithmKind::kEF14SGD, *noisy, q, top2, kSeed);
    double worst = 0.0;
    for (std::size_t t = 0; t < kRounds; ++t) {
      DenseVector sbar(noisy->dim());
      for (const auto& node : state.nodes) sbar += *node.s_cached;
      sbar *= 1.0 / static_cast<double>(state.nodes.size());
      DenseVector expect = VirtualIterate(state);
      Axpy(-q.GammaAt(t), sbar, expect);
      Round(state, *noisy, q, top2);
      const DenseVector got = VirtualIterate(state);
      worst = std::max(worst, Norm(got - expect) / std::max(Norm(got), 1e-300));
    }
    out.push_back({"EF14 virtual iterate", worst <= 1e-10,
                   Format("max relative error %.3g <= 1e-10", worst)});
  }

  {
    double worst = 0.0;
    for (AlgorithmKind kind : {AlgorithmKind::kEF21SGDM, AlgorithmKind::kEF21STORM,
                               AlgorithmKind::kEF14SGD}) {
      HyperParams q = p;
      q.eta = 0.3;
      q.gamma = 0.02;
      AlgorithmState state = Init(kind, *noisy, q, top2, kSeed);
      for (std::size_t t = 0; t < kRounds; ++t) {
        Round(state, *noisy, q, top2);
        DenseVector mean(noisy->dim());
        for (const auto& node : state.nodes) mean += node.g;
        mean *= 1.0 / static_cast<double>(state.nodes.size());
        worst = std::max(worst, Norm(state.server.g - mean) / (1.0 + Norm(state.server.g)));
      }
    }
    out.push_back({"aggregate drift", worst <= 1e-10,
                   Format("max ||g - mean g_i|| / (1 + ||g||) = %.3g <= 1e-10", worst)});
  }
  return out;
}

std::vector<CheckResult> VerifyTheorem1(std::size_t workers) {
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 0; s < 50; ++s) seeds.push_back(s);
  const Theorem1Report r =
      Theorem1Check(1.0, 1.0, 1e-3, 1, 1, 10000, seeds, DenseVector{0.0, -0.01}, workers);
  const bool pass = r.pass && r.lhs - r.rhs >= 3.0 * r.lhs_stderr;
  return {{"theorem1_lower_bound", pass,
           Format("mean ||grad f(x^T)||^2 = %.6g (se %.2g) >= %.6g with 3 se margin", r.lhs,
                  r.lhs_stderr, r.rhs)}};
}

namespace {

RunConfig LyapunovConfig(double sigma, std::size_t seeds) {
  auto problem = std::make_shared<QuadraticProblem>(GenerateQuadratic(20, 100, 0.01, 1.0, 0),
                                                    sigma);
  RunConfig cfg;
  cfg.problem = problem;
  cfg.algorithm = AlgorithmKind::kEF21SGDM;
  cfg.compressor = CompressorSpec::TopK(5, problem->dim());
  TheoryInputs in;
  in.smoothness = problem->Smoothness();
  in.alpha = ContractionAlpha(cfg.compressor);
  in.sigma = sigma;
  in.n = problem->nodes();
  in.T = 2000;
  in.delta0 = ObjectiveGap(*problem, problem->x0());
  HyperParams base;
  base.rounds = in.T;
  cfg.params = TheoreticalParams(cfg.algorithm, in, base);
  cfg.metric_every = 10;
  cfg.lyapunov = true;
  cfg.seeds.clear();
  for (std::uint64_t s = 0; s < seeds; ++s) cfg.seeds.push_back(s);
  return cfg;
}

}  // namespace

std::vector<CheckResult> VerifyLyapunov(std::size_t workers) {
  std::vector<CheckResult> out;
  {
    const RunConfig cfg = LyapunovConfig(0.0, 1);
    const RunTrace tr = Run(cfg, 0);
    std::size_t increases = 0;
    for (std::size_t k = 1; k < tr.rows.size(); ++k) {
      if (*tr.rows[k].lyapunov > *tr.rows[k - 1].lyapunov) ++increases;
    }
    out.push_back({"deterministic nonincreasing", !tr.diverged() && increases == 0,
                   Format("%.0f increases over %.0f logged pairs (gamma %.3g)",
                          static_cast<double>(increases),
                          static_cast<double>(tr.rows.size() - 1), cfg.params.gamma)});
  }
  {
    const RunConfig cfg = LyapunovConfig(0.01, 20);
    const QuantileResult res = RunQuantiles(cfg, workers);
    std::vector<double> avg;
    bool complete = true;
    for (std::size_t k = 0; k < res.traces.front().rows.size(); ++k) {
      double sum = 0.0;
      for (const auto& tr : res.traces) {
        if (tr.rows.size() != res.traces.front().rows.size()) complete = false;
        sum += *tr.rows[k].lyapunov;
      }
      avg.push_back(sum / static_cast<double>(res.traces.size()));
    }
    std::size_t increases = 0;
    for (std::size_t k = 1; k < avg.size(); ++k) {
      if (avg[k] > avg[k - 1]) ++increases;
    }
    const double frac = static_cast<double>(increases) / static_cast<double>(avg.size() - 1);
    out.push_back({"stochastic mostly nonincreasing", complete && frac <= 0.05,
                   Format("upward pairs %.4f <= 0.05 of %.0f", frac,
                          static_cast<double>(avg.size() - 1))});
    out.push_back({"stochastic final below initial", complete && avg.back() < avg.front(),
                   Format("Lambda_T = %.6g < Lambda_0 = %.6g", avg.back(), avg.front())});
  }
  return out;
}

namespace {

CheckResult StormCheck(const std::string& name, const Problem& problem, double noise_floor) {
  constexpr std::size_t kDraws = 10000;
  const auto spec = CompressorSpec::TopK(2, problem.dim());
  HyperParams p;
  p.gamma = 0.05;
  p.eta = 0.3;
  p.batch = 2;
  p.batch_init = 2;
  p.rounds = 10;
  AlgorithmState state = Init(AlgorithmKind::kEF21STORM, problem, p, spec, 5);
  for (int t = 0; t < 3; ++t) Round(state, problem, p, spec);

  const DenseVector x_old = state.server.x;
  DenseVector x_new = x_old;
  Axpy(-p.GammaAt(state.server.t), state.server.g, x_new);
  const std::size_t d = problem.dim();
  std::size_t worst_node = 0;
  double worst_z = 0.0;
  for (std::size_t i = 0; i < problem.nodes(); ++i) {
    DenseVector expect = problem.NodeGradient(i, x_new);
    Axpy(1.0 - p.EtaAt(state.server.t), *state.nodes[i].w - problem.NodeGradient(i, x_old),
         expect);
    std::vector<double> sum(d, 0.0);
    std::vector<double> sum_sq(d, 0.0);
    for (std::size_t draw = 0; draw < kDraws; ++draw) {
      AlgorithmState copy = state;
      copy.seed = 1000 + draw;
      Round(copy, problem, p, spec);
      const DenseVector& w = *copy.nodes[i].w;
      for (std::size_t j = 0; j < d; ++j) {
        sum[j] += w[j];
        sum_sq[j] += w[j] * w[j];
      }
    }
    for (std::size_t j = 0; j < d; ++j) {
      const double mean = sum[j] / kDraws;
      const double var = std::max(0.0, sum_sq[j] / kDraws - mean * mean);
      const double se = std::sqrt(var * kDraws / (kDraws - 1) / kDraws);
      const double tol = 4.0 * se + noise_floor * (1.0 + std::abs(expect[j]));
      const double z = std::abs(mean - expect[j]) / tol * 4.0;
      if (z > worst_z) {
        worst_z = z;
        worst_node = i;
      }
    }
  }
  return {name, worst_z <= 4.0,
          Format("worst |mean - expected| = %.3f standard errors (node %.0f), limit 4",
                 worst_z, static_cast<double>(worst_node))};
}

}  // namespace

std::vector<CheckResult> VerifyStorm() {
  std::vector<CheckResult> out;
  const auto quad = SmallQuadratic(0.5);
  out.push_back(StormCheck("storm unbiased (quadratic)", *quad, 1e-12));
  const Dataset data = GenerateBlobs(3, 4, 60, 3);
  const LogRegProblem logreg(SplitDataset(data, 2, SplitPolicy::kRandom, 1, 0.01));
  out.push_back(StormCheck("storm unbiased (logreg)", logreg, 1e-12));
  return out;
}

}  // namespace efsim::cli
