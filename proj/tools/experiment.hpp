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
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "efsim/compressor.hpp"
#include "efsim/harness.hpp"
#include "efsim/optim.hpp"
#include "efsim/problem.hpp"

namespace efsim::cli {

/// One `key = value` setting and the line it came from (0 = default or
/// command-line override).
struct Setting {
  std::string value;
  std::size_t line = 0;
};

/// Experiment document. Keys are validated against the schema; every key is
/// present after FillDefaults().
using ConfigMap = std::map<std::string, Setting>;

struct KeyInfo {
  const char* key;
  const char* default_value;
  const char* help;
};

/// The experiment schema, in documentation order.
const std::vector<KeyInfo>& Schema();

/// Parses "key = value" lines; '#' starts a comment. Unknown keys and
/// duplicates raise ParseError with the line number. Per-algorithm keys
/// `gamma.<ALG>` and `eta.<ALG>` are accepted.
ConfigMap ParseConfig(const std::string& text);
ConfigMap LoadConfigFile(const std::string& path);
/// Reads the "config" object of a manifest written by RunExperiment.
ConfigMap LoadManifestConfig(const std::string& path);

void FillDefaults(ConfigMap& config);
/// Applies "key=value" (throws ParseError on malformed or unknown keys).
void ApplyOverride(ConfigMap& config, const std::string& assignment);
std::string FormatConfig(const ConfigMap& config);

struct AlgorithmPlan {
  AlgorithmKind kind;
  HyperParams params;
  bool theory = false;
};

/// Typed view of a validated ConfigMap.
struct Experiment {
  ConfigMap config;
  std::string name;
  std::shared_ptr<const Problem> problem;
  CompressorSpec compressor;
  std::vector<AlgorithmPlan> plans;
  std::vector<std::uint64_t> seeds;
  std::size_t metric_every = 10;
  bool lyapunov = false;
  std::string out_dir;
  std::string tune;  // none | sweep
  int sweep_k_lo = -20;
  int sweep_k_hi = 20;
  SweepCriterion sweep_criterion = SweepCriterion::kFinalLoss;
  std::string desk_scaling;
  double delta0 = 0.0;
};

/// Builds problem, compressor and per-algorithm parameters. Value errors
/// name the offending key and its line.
Experiment BuildExperiment(const ConfigMap& config);

struct RunSummary {
  std::string algorithm;
  std::size_t diverged_seeds = 0;
  std::size_t total_seeds = 0;
};

/// Runs (and, with tune = sweep, first tunes) every algorithm; writes one
/// trace CSV per seed, one quantile CSV per algorithm and manifest.json into
/// out_dir. Returns one summary per algorithm.
std::vector<RunSummary> RunExperiment(const Experiment& exp, std::size_t workers,
                                      bool verbose = true);

/// Named figure presets: fig1, fig5, speedup, quad3, mnist_small. Each
/// preset may expand into several experiments.
std::vector<std::string> PresetNames();
std::vector<ConfigMap> Preset(const std::string& name);

/// Seed lists: "3", "0,4,9" or the inclusive range "0..9".
std::vector<std::uint64_t> ParseSeeds(const std::string& text);

}  // namespace efsim::cli
