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

// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "efsim/harness.hpp"
#include "efsim/quadratic.hpp"
#include "experiment.hpp"
#include "verify.hpp"

namespace {

namespace fs = std::filesystem;
using efsim::cli::CheckResult;

struct Context {
  fs::path out;
  std::size_t workers = 1;
  std::vector<std::string> replay_dirs;  // experiment output dirs for criterion 10
};

std::string Fmt(const char* fmt, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, a, b, c, d);
  return buf;
}

std::string Join(const std::vector<CheckResult>& checks, bool* pass) {
  std::string detail;
  *pass = efsim::cli::AllPass(checks);
  for (const auto& c : checks) {
    if (!detail.empty()) detail += "; ";
    detail += (c.pass ? "" : "FAILED ") + c.name + " (" + c.detail + ")";
  }
  return detail;
}

double Median(std::vector<double> v) { return efsim::Quantile(std::move(v), 0.5); }

double FinalGradNorm(const efsim::RunTrace& tr) { return tr.rows.back().grad_norm; }

// Runs an experiment through the CLI pipeline, returning the typed view and
// traces per algorithm.
struct ExperimentRun {
  efsim::cli::Experiment exp;
  std::vector<std::vector<efsim::RunTrace>> traces;  // per plan, seed order
};

ExperimentRun RunPipeline(efsim::cli::ConfigMap config, Context& ctx) {
  efsim::cli::ApplyOverride(config, "out=" + (ctx.out / "first").string());
  ExperimentRun run{efsim::cli::BuildExperiment(config), {}};
  efsim::cli::RunExperiment(run.exp, ctx.workers, false);
  for (const auto& plan : run.exp.plans) {
    std::vector<efsim::RunTrace> traces;
    for (auto seed : run.exp.seeds) {
      const std::string file = efsim::AlgorithmName(plan.kind) + "_seed" + std::to_string(seed) +
                               ".csv";
      traces.push_back(efsim::ReadTraceCsv((fs::path(run.exp.out_dir) / file).string()));
    }
    run.traces.push_back(std::move(traces));
  }
  ctx.replay_dirs.push_back(run.exp.name);
  return run;
}

std::vector<double> FinalNorms(const std::vector<efsim::RunTrace>& traces) {
  std::vector<double> v;
  for (const auto& tr : traces) v.push_back(FinalGradNorm(tr));
  return v;
}

CheckResult Criterion1(Context& ctx) {
  bool pass = false;
  const std::string detail = Join(efsim::cli::VerifyTheorem1(ctx.workers), &pass);
  return {"theorem1 lower bound", pass, detail};
}

CheckResult Criterion2(Context& ctx) {
  const ExperimentRun run = RunPipeline(efsim::cli::Preset("fig1")[0], ctx);
  const double g0 = run.traces[0][0].rows.front().grad_norm;
  const double sgd = Median(FinalNorms(run.traces[0]));
  const double sgdm = Median(FinalNorms(run.traces[1]));
  const bool pass = sgd >= g0 && sgdm <= 0.5 * g0;
  return {"fig1 qualitative", pass,
          Fmt("||grad f(x0)|| = %.4g; EF21SGD median final %.4g (need >= %.4g)", g0, sgd, g0) +
              Fmt("; EF21SGDM median final %.4g (need <= %.4g)", sgdm, 0.5 * g0)};
}

CheckResult Criterion3(Context& ctx) {
  std::vector<double> sgd, sgdm;
  for (const auto& config : efsim::cli::Preset("speedup")) {
    const ExperimentRun run = RunPipeline(config, ctx);
    sgd.push_back(Median(FinalNorms(run.traces[0])));
    sgdm.push_back(Median(FinalNorms(run.traces[1])));
  }
  const double improvement = sgd[0] / sgd[2];
  const bool flat = improvement <= 1.5;
  const bool monotone = sgdm[0] > sgdm[1] && sgdm[1] > sgdm[2];
  return {"no improvement with n", flat && monotone,
          Fmt("EF21SGD medians n=1,4,16: %.4g, %.4g, %.4g; improvement n=1 -> 16 = %.3g "
              "(need <= 1.5)",
              sgd[0], sgd[1], sgd[2], improvement) +
              Fmt("; EF21SGDM medians: %.4g, %.4g, %.4g (need strictly decreasing)", sgdm[0],
                  sgdm[1], sgdm[2])};
}

CheckResult Criterion4() {
  bool pass = false;
  const std::string detail = Join(efsim::cli::VerifyReductions(), &pass);
  return {"reduction oracles", pass, detail};
}

CheckResult Criterion5() {
  bool pass = false;
  const std::string detail = Join(efsim::cli::VerifyCompressors(), &pass);
  return {"compressor definitions", pass, detail};
}

CheckResult Criterion6(Context& ctx) {
  bool pass = false;
  const std::string detail = Join(efsim::cli::VerifyLyapunov(ctx.workers), &pass);
  return {"Lyapunov descent", pass, detail};
}

CheckResult Criterion7(Context& ctx) {
  efsim::cli::ConfigMap config;
  for (const auto& c : efsim::cli::Preset("quad3")) {
    if (c.at("sigma").value == "0.01") config = c;
  }
  const ExperimentRun run = RunPipeline(config, ctx);
  auto floor = [](const std::vector<efsim::RunTrace>& traces) {
    std::vector<double> v;
    for (const auto& tr : traces) v.push_back(tr.rows.back().obj_gap);
    return Median(v);
  };
  const double ef14 = floor(run.traces[0]);
  const double ef21 = floor(run.traces[1]);
  const double coords14 = static_cast<double>(run.traces[0][0].rows.back().coords_cum);
  const double coords21 = static_cast<double>(run.traces[1][0].rows.back().coords_cum);
  const bool pass = coords14 == coords21 && ef21 <= 0.5 * ef14;
  return {"quadratic ordering", pass,
          Fmt("median final f - f*: EF21SGDM %.4g, EF14SGD %.4g, ratio %.3g (need <= 0.5)",
              ef21, ef14, ef21 / ef14) +
              Fmt("; coordinates sent %.0f vs %.0f", coords21, coords14)};
}

CheckResult Criterion8(Context& ctx) {
  const efsim::cli::ConfigMap config = efsim::cli::ParseConfig(
      "name = sgdm_bound\n"
      "problem = quadratic\n"
      "nodes = 1\n"
      "dim = 20\n"
      "lambda = 0.01\n"
      "scale = 1\n"
      "sigma = 0.1\n"
      "algorithms = SGDM\n"
      "compressor = identity\n"
      "params = theory\n"
      "rounds = 1000\n"
      "seeds = 0..19\n"
      "metric_every = 1\n");
  const ExperimentRun run = RunPipeline(config, ctx);
  const efsim::HyperParams& hp = run.exp.plans[0].params;
  const double sigma = 0.1;
  const std::size_t T = hp.rounds;
  double sum_eta = 0.0, sum_eta_sq = 0.0, weighted = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const double eta = hp.EtaAt(t);
    sum_eta += eta;
    sum_eta_sq += eta * eta;
    double mean_sq = 0.0;
    for (const auto& tr : run.traces[0]) mean_sq += std::pow(tr.rows.at(t).grad_norm, 2);
    weighted += eta * mean_sq / static_cast<double>(run.traces[0].size());
  }
  const double lhs = weighted / sum_eta;
  const double lambda0 =
      run.exp.delta0 + hp.gamma * sigma * sigma / static_cast<double>(hp.batch_init);
  const double bound = (2.0 * lambda0 / hp.gamma + 2.0 * sigma * sigma * sum_eta_sq) / sum_eta;
  return {"SGDM time-varying bound", lhs <= 1.5 * bound,
          Fmt("eta-weighted mean ||grad f||^2 = %.4g <= 1.5 x %.4g = %.4g (gamma %.4g)", lhs,
              bound, 1.5 * bound, hp.gamma)};
}

CheckResult Criterion9() {
  bool pass = false;
  const std::string detail = Join(efsim::cli::VerifyStorm(), &pass);
  return {"STORM conditional unbiasedness", pass, detail};
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CheckResult Criterion10(Context& ctx) {
  std::size_t files = 0, mismatches = 0;
  std::string first_mismatch;
  for (const auto& name : ctx.replay_dirs) {
    const fs::path a = ctx.out / "first" / name;
    efsim::cli::ConfigMap config =
        efsim::cli::LoadManifestConfig((a / "manifest.json").string());
    efsim::cli::ApplyOverride(config, "out=" + (ctx.out / "replay").string());
    efsim::cli::RunExperiment(efsim::cli::BuildExperiment(config), ctx.workers, false);
    const fs::path b = ctx.out / "replay" / name;
    for (const auto& entry : fs::directory_iterator(a)) {
      if (entry.path().extension() != ".csv") continue;
      ++files;
      if (Slurp(entry.path()) != Slurp(b / entry.path().filename())) {
        ++mismatches;
        if (first_mismatch.empty()) first_mismatch = (fs::path(name) / entry.path().filename()).string();
      }
    }
  }
  return {"manifest determinism", files > 0 && mismatches == 0,
          Fmt("%.0f CSV files replayed from %.0f manifests, %.0f differ", static_cast<double>(files),
              static_cast<double>(ctx.replay_dirs.size()), static_cast<double>(mismatches)) +
              (first_mismatch.empty() ? "" : " (first: " + first_mismatch + ")")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"efsim acceptance suite"};
  Context ctx;
  std::string out = (fs::temp_directory_path() / "efsim_acceptance").string();
  std::vector<int> only;
  ctx.workers = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--out", out, "scratch directory for experiment outputs");
  app.add_option("--workers", ctx.workers, "worker threads");
  app.add_option("--only", only, "run only these criteria (10 needs 2, 3, 7 or 8)")->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  ctx.out = out;
  fs::remove_all(ctx.out);
  fs::create_directories(ctx.out);

  const std::vector<std::function<CheckResult()>> criteria = {
      [&] { return Criterion1(ctx); }, [&] { return Criterion2(ctx); },
      [&] { return Criterion3(ctx); }, [] { return Criterion4(); },
      [] { return Criterion5(); },     [&] { return Criterion6(ctx); },
      [&] { return Criterion7(ctx); }, [&] { return Criterion8(ctx); },
      [] { return Criterion9(); },     [&] { return Criterion10(ctx); },
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    CheckResult r;
    try {
      r = criteria[i]();
    } catch (const std::exception& e) {
      r = {"error", false, e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %2d %s: %s [%.1fs] %s\n", id, r.pass ? "PASS" : "FAIL",
                r.name.c_str(), secs, r.detail.c_str());
    std::fflush(stdout);
    if (!r.pass) ++failures;
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
