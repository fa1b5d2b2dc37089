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

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "efsim/error.hpp"
#include "efsim/logreg.hpp"
#include "efsim/quadratic.hpp"
#include "experiment.hpp"
#include "verify.hpp"

namespace {

namespace cli = efsim::cli;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitFailure = 2;
constexpr int kExitAllDiverged = 3;

struct RunFlags {
  std::vector<std::string> overrides;
  std::string seed;
  std::string out;
  std::size_t metric_every = 0;
  std::size_t workers = 0;
  bool quiet = false;
  bool print_config = false;
};

void AddRunFlags(CLI::App* app, RunFlags& f) {
  app->add_option("--override", f.overrides, "key=value applied after the file (repeatable)");
  app->add_option("--seed", f.seed, "seed list replacing the configured one (7, 0,3 or 0..9)");
  app->add_option("--out", f.out, "output root directory");
  app->add_option("--metric-every", f.metric_every, "rounds between metric rows")
      ->check(CLI::PositiveNumber);
  app->add_option("--workers", f.workers, "worker threads (default: available cores)");
  app->add_flag("--quiet", f.quiet, "suppress progress lines");
  app->add_flag("--print-config", f.print_config, "print the resolved configuration and exit");
}

std::size_t Workers(std::size_t requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

void ApplyFlags(cli::ConfigMap& config, const RunFlags& f) {
  for (const auto& o : f.overrides) cli::ApplyOverride(config, o);
  if (!f.seed.empty()) cli::ApplyOverride(config, "seeds=" + f.seed);
  if (!f.out.empty()) cli::ApplyOverride(config, "out=" + f.out);
  if (f.metric_every > 0) {
    cli::ApplyOverride(config, "metric_every=" + std::to_string(f.metric_every));
  }
}

int RunConfigs(std::vector<cli::ConfigMap> configs, const RunFlags& f) {
  std::vector<cli::Experiment> experiments;
  for (auto& config : configs) {
    ApplyFlags(config, f);
    experiments.push_back(cli::BuildExperiment(config));
  }
  if (f.print_config) {
    for (const auto& exp : experiments) {
      std::cout << "# " << exp.name << "\n" << cli::FormatConfig(exp.config);
    }
    return kExitOk;
  }
  int code = kExitOk;
  for (const auto& exp : experiments) {
    for (const auto& s : cli::RunExperiment(exp, Workers(f.workers), !f.quiet)) {
      if (s.total_seeds > 0 && s.diverged_seeds == s.total_seeds) {
        std::cerr << exp.name << ": every seed of " << s.algorithm << " diverged\n";
        code = kExitAllDiverged;
      }
    }
    if (!f.quiet) std::cout << "wrote " << exp.out_dir << "\n";
  }
  return code;
}

int Verify(const std::string& suite, std::size_t workers) {
  std::vector<std::string> suites;
  if (suite == "all") {
    suites = cli::VerifySuiteNames();
  } else {
    suites = {suite};
  }
  bool ok = true;
  for (const auto& name : suites) {
    for (const auto& c : cli::RunVerifySuite(name, Workers(workers))) {
      std::printf("[%s] %s %s: %s\n", c.pass ? "PASS" : "FAIL", name.c_str(), c.name.c_str(),
                  c.detail.c_str());
      ok = ok && c.pass;
    }
  }
  return ok ? kExitOk : kExitFailure;
}

int Sweep(const std::string& file, RunFlags f, int k_lo, int k_hi, const std::string& criterion) {
  cli::ConfigMap config = cli::LoadConfigFile(file);
  ApplyFlags(config, f);
  cli::ApplyOverride(config, "sweep_k_lo=" + std::to_string(k_lo));
  cli::ApplyOverride(config, "sweep_k_hi=" + std::to_string(k_hi));
  if (!criterion.empty()) cli::ApplyOverride(config, "sweep_criterion=" + criterion);
  const cli::Experiment exp = cli::BuildExperiment(config);
  std::filesystem::create_directories(exp.out_dir);
  for (const auto& plan : exp.plans) {
    efsim::RunConfig rc;
    rc.problem = exp.problem;
    rc.algorithm = plan.kind;
    rc.compressor = exp.compressor;
    rc.params = plan.params;
    rc.metric_every = exp.metric_every;
    rc.seeds = exp.seeds;
    const efsim::SweepResult res =
        efsim::Sweep(rc, exp.sweep_k_lo, exp.sweep_k_hi, exp.sweep_criterion, Workers(f.workers));
    std::ostringstream csv;
    csv << "k,gamma,score,diverged\n";
    std::cout << efsim::AlgorithmName(plan.kind) << " ("
              << efsim::SweepCriterionName(exp.sweep_criterion) << ")\n";
    for (const auto& p : res.table) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%d\n", p.k, p.gamma, p.score,
                    p.diverged ? 1 : 0);
      csv << buf;
      std::printf("  k=%4d gamma=%-12.6g %s\n", p.k, p.gamma,
                  p.diverged ? "diverged" : std::to_string(p.score).c_str());
    }
    std::printf("  best: gamma = 2^%d\n", res.best_point().k);
    efsim::WriteFileAtomic(
        (std::filesystem::path(exp.out_dir) / (efsim::AlgorithmName(plan.kind) + "_sweep.csv"))
            .string(),
        csv.str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"efsim: error-feedback compressed optimization simulator"};
  app.require_subcommand(1);

  RunFlags run_flags;
  std::string run_file;
  auto* run = app.add_subcommand("run", "run an experiment file or a manifest.json");
  run->add_option("file", run_file, "experiment file (key = value) or manifest.json")
      ->required();
  AddRunFlags(run, run_flags);

  RunFlags repro_flags;
  std::string preset;
  auto* repro = app.add_subcommand("reproduce", "run a named figure preset");
  repro->add_option("preset", preset, "fig1 | fig5 | speedup | quad3 | mnist_small")->required();
  AddRunFlags(repro, repro_flags);

  std::string suite = "all";
  std::size_t verify_workers = 0;
  auto* verify = app.add_subcommand("verify", "run a property suite");
  verify->add_option("suite", suite, "compressors | reductions | theorem1 | lyapunov | storm | all");
  verify->add_option("--workers", verify_workers, "worker threads");

  auto* gen = app.add_subcommand("gen", "write a quadratic task file or a blobs dataset");
  gen->require_subcommand(1);
  std::string gen_out;
  std::size_t q_nodes = 100, q_dim = 1000;
  double q_lambda = 0.01, q_scale = 1.0;
  std::uint64_t q_seed = 0;
  auto* gen_quad = gen->add_subcommand("quadratic", "generated heterogeneous quadratic task");
  gen_quad->add_option("--nodes", q_nodes, "number of nodes")->check(CLI::PositiveNumber);
  gen_quad->add_option("--dim", q_dim, "dimension")->check(CLI::Range(2, 1 << 24));
  gen_quad->add_option("--lambda", q_lambda, "smallest eigenvalue of the mean matrix");
  gen_quad->add_option("--scale", q_scale, "heterogeneity scale");
  gen_quad->add_option("--seed", q_seed, "generator seed");
  gen_quad->add_option("--out", gen_out, "output file")->required();
  std::size_t b_classes = 2, b_features = 10, b_examples = 200;
  double b_sep = 1.0;
  std::uint64_t b_seed = 0;
  auto* gen_blobs = gen->add_subcommand("blobs", "Gaussian blobs classification data (LIBSVM)");
  gen_blobs->add_option("--classes", b_classes, "classes")->check(CLI::Range(2, 1 << 16));
  gen_blobs->add_option("--features", b_features, "features")->check(CLI::PositiveNumber);
  gen_blobs->add_option("--examples", b_examples, "examples")->check(CLI::PositiveNumber);
  gen_blobs->add_option("--separation", b_sep, "class centre spread");
  gen_blobs->add_option("--seed", b_seed, "generator seed");
  gen_blobs->add_option("--out", gen_out, "output file")->required();

  RunFlags sweep_flags;
  std::string sweep_file;
  int k_lo = -20, k_hi = 20;
  std::string criterion;
  auto* sweep = app.add_subcommand("sweep", "tune gamma over 2^k for every algorithm of a file");
  sweep->add_option("file", sweep_file, "experiment file")->required();
  sweep->add_option("--k-lo", k_lo, "smallest exponent");
  sweep->add_option("--k-hi", k_hi, "largest exponent");
  sweep->add_option("--criterion", criterion, "final_loss | final_grad_norm");
  AddRunFlags(sweep, sweep_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return RunConfigs({cli::LoadConfigFile(run_file)}, run_flags);
    if (repro->parsed()) return RunConfigs(cli::Preset(preset), repro_flags);
    if (verify->parsed()) return Verify(suite, verify_workers);
    if (gen_quad->parsed()) {
      efsim::SaveQuadraticTask(
          efsim::GenerateQuadratic(q_nodes, q_dim, q_lambda, q_scale, q_seed), gen_out);
      std::cout << "wrote " << gen_out << "\n";
      return kExitOk;
    }
    if (gen_blobs->parsed()) {
      efsim::WriteLibsvm(efsim::GenerateBlobs(b_classes, b_features, b_examples, b_seed, b_sep),
                         gen_out);
      std::cout << "wrote " << gen_out << "\n";
      return kExitOk;
    }
    if (sweep->parsed()) return Sweep(sweep_file, sweep_flags, k_lo, k_hi, criterion);
  } catch (const efsim::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const efsim::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}
