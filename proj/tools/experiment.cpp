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

#include "experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "efsim/counterexample.hpp"
#include "efsim/error.hpp"
#include "efsim/logreg.hpp"
#include "efsim/quadratic.hpp"
#include "json.hpp"

namespace efsim::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

const std::vector<KeyInfo>& Schema() {
  static const std::vector<KeyInfo> kSchema = {
      {"name", "experiment", "experiment name; outputs go to <out>/<name>"},
      {"problem", "counterexample", "counterexample | quadratic | logreg"},
      {"nodes", "1", "number of nodes n"},
      {"dim", "100", "quadratic dimension d"},
      {"lambda", "0.01", "quadratic: smallest eigenvalue of the mean matrix"},
      {"scale", "1", "quadratic: heterogeneity scale s"},
      {"task_seed", "0", "quadratic: generator seed"},
      {"task_file", "", "quadratic: load this task file instead of generating"},
      {"sigma", "1", "noise level (E||noise||^2 = sigma^2 per sample)"},
      {"L", "1", "counterexample: curvature"},
      {"x0", "", "starting point as comma-separated values (default per problem)"},
      {"data", "blobs", "logreg: LIBSVM path or 'blobs' for the synthetic generator"},
      {"classes", "10", "logreg: number of classes c"},
      {"features", "784", "logreg: feature dimension l"},
      {"reg", "0.001", "logreg: nonconvex regulariser weight"},
      {"split", "by_label", "logreg: by_label | random"},
      {"split_seed", "0", "logreg: seed of the random split"},
      {"blob_examples", "1000", "blobs: number of examples"},
      {"blob_seed", "0", "blobs: generator seed"},
      {"blob_separation", "1", "blobs: standard deviation of the class centres"},
      {"algorithms", "EF21SGDM", "comma-separated algorithm tags"},
      {"compressor", "topk", "topk | randk | identity | threshold"},
      {"k", "1", "topk/randk: kept coordinates"},
      {"threshold", "0.1", "threshold: hard threshold tau"},
      {"gamma", "0.001", "step size (gamma_0 for decaying schedules)"},
      {"eta", "0.1", "momentum (eta_0 for decaying schedules)"},
      {"schedule", "constant", "constant | inv_sqrt_t | inv_sqrt_T"},
      {"batch", "1", "mini-batch size B"},
      {"batch_init", "1", "initial mini-batch size"},
      {"rounds", "100", "number of rounds T"},
      {"params", "manual", "manual | theory (step size, momentum, B_init from theory)"},
      {"delta0", "", "theory: f(x0) - f* (default: computed, or f(x0) if f* unknown)"},
      {"seeds", "0", "seed list: 3 | 0,4,9 | 0..9"},
      {"metric_every", "10", "rounds between metric evaluations"},
      {"lyapunov", "false", "log the Lyapunov diagnostic for momentum methods"},
      {"out", "out", "output root directory"},
      {"tune", "none", "none | sweep (tune gamma over 2^k before running)"},
      {"sweep_k_lo", "-20", "sweep: smallest exponent k"},
      {"sweep_k_hi", "20", "sweep: largest exponent k"},
      {"sweep_criterion", "final_loss", "sweep: final_loss | final_grad_norm"},
      {"desk_scaling", "", "free-text note on deviations from published scale"},
  };
  return kSchema;
}

namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool KnownKey(const std::string& key) {
  for (const auto& k : Schema()) {
    if (key == k.key) return true;
  }
  const auto dot = key.find('.');
  if (dot != std::string::npos) {
    const std::string base = key.substr(0, dot);
    if (base != "gamma" && base != "eta") return false;
    try {
      ParseAlgorithm(key.substr(dot + 1));
      return true;
    } catch (const InvalidArgument&) {
      return false;
    }
  }
  return false;
}

// Per-algorithm keys are stored under the canonical algorithm tag.
std::string NormalizeKey(const std::string& key) {
  const auto dot = key.find('.');
  if (dot == std::string::npos) return key;
  return key.substr(0, dot) + "." + AlgorithmName(ParseAlgorithm(key.substr(dot + 1)));
}

void Insert(ConfigMap& config, const std::string& raw_key, const std::string& value,
            std::size_t line, bool allow_replace) {
  if (!KnownKey(raw_key)) throw ParseError("unknown key '" + raw_key + "'", line);
  const std::string key = NormalizeKey(raw_key);
  if (!allow_replace && config.count(key)) {
    throw ParseError("duplicate key '" + key + "'", line);
  }
  config[key] = Setting{value, line};
}

[[noreturn]] void BadValue(const ConfigMap& c, const std::string& key, const std::string& why) {
  const auto it = c.find(key);
  const std::size_t line = it == c.end() ? 0 : it->second.line;
  const std::string v = it == c.end() ? "" : it->second.value;
  throw ParseError("key '" + key + "' = '" + v + "': " + why, line);
}

const std::string& Str(const ConfigMap& c, const std::string& key) {
  const auto it = c.find(key);
  if (it == c.end()) throw InvalidArgument("missing key '" + key + "'");
  return it->second.value;
}

double Num(const ConfigMap& c, const std::string& key) {
  const std::string& v = Str(c, key);
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    BadValue(c, key, "expected a finite number");
  }
}

long long Int(const ConfigMap& c, const std::string& key) {
  const std::string& v = Str(c, key);
  try {
    std::size_t pos = 0;
    const long long d = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    BadValue(c, key, "expected an integer");
  }
}

std::size_t Count(const ConfigMap& c, const std::string& key, long long min_value) {
  const long long v = Int(c, key);
  if (v < min_value) BadValue(c, key, "must be >= " + std::to_string(min_value));
  return static_cast<std::size_t>(v);
}

std::uint64_t U64(const ConfigMap& c, const std::string& key) {
  const std::string& v = Str(c, key);
  try {
    std::size_t pos = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument(v);
    const auto d = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    BadValue(c, key, "expected an unsigned integer");
  }
}

bool Bool(const ConfigMap& c, const std::string& key) {
  const std::string& v = Str(c, key);
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  BadValue(c, key, "expected true or false");
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(s);
  while (std::getline(ss, cur, ',')) {
    cur = Trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

DenseVector Vector(const ConfigMap& c, const std::string& key, std::size_t dim) {
  std::vector<double> vals;
  for (const auto& tok : SplitList(Str(c, key))) {
    try {
      std::size_t pos = 0;
      vals.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      BadValue(c, key, "expected comma-separated numbers");
    }
  }
  if (vals.size() != dim) {
    BadValue(c, key, "expected " + std::to_string(dim) + " values, got " +
                         std::to_string(vals.size()));
  }
  return DenseVector(std::move(vals));
}

}  // namespace

std::vector<std::uint64_t> ParseSeeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  auto parse = [&text](const std::string& s) {
    std::size_t pos = 0;
    if (s.empty() || s[0] == '-') throw InvalidArgument("bad seed list '" + text + "'");
    const auto v = std::stoull(s, &pos);
    if (pos != s.size()) throw InvalidArgument("bad seed list '" + text + "'");
    return static_cast<std::uint64_t>(v);
  };
  try {
    const auto range = text.find("..");
    if (range != std::string::npos) {
      const std::uint64_t lo = parse(Trim(text.substr(0, range)));
      const std::uint64_t hi = parse(Trim(text.substr(range + 2)));
      if (hi < lo) throw InvalidArgument("empty seed range '" + text + "'");
      for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    } else {
      for (const auto& tok : SplitList(text)) seeds.push_back(parse(tok));
    }
  } catch (const std::invalid_argument&) {
    throw InvalidArgument("bad seed list '" + text + "'");
  } catch (const std::out_of_range&) {
    throw InvalidArgument("seed out of range in '" + text + "'");
  }
  if (seeds.empty()) throw InvalidArgument("seed list is empty");
  return seeds;
}

ConfigMap ParseConfig(const std::string& text) {
  ConfigMap config;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line_no);
    const std::string key = Trim(line.substr(0, eq));
    if (key.empty()) throw ParseError("empty key", line_no);
    Insert(config, key, Trim(line.substr(eq + 1)), line_no, false);
  }
  return config;
}

ConfigMap LoadConfigFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open experiment file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    return LoadManifestConfig(path);
  }
  return ParseConfig(ss.str());
}

ConfigMap LoadManifestConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(std::string("manifest is not valid JSON: ") + e.what(), 0);
  }
  if (!doc.contains("config") || !doc["config"].is_object()) {
    throw ParseError("manifest has no 'config' object", 0);
  }
  ConfigMap config;
  for (const auto& [key, value] : doc["config"].items()) {
    if (!value.is_string()) throw ParseError("manifest config value for '" + key + "' is not a string", 0);
    Insert(config, key, value.get<std::string>(), 0, false);
  }
  return config;
}

void FillDefaults(ConfigMap& config) {
  for (const auto& k : Schema()) {
    if (!config.count(k.key)) config[k.key] = Setting{k.default_value, 0};
  }
}

void ApplyOverride(ConfigMap& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ParseError("override '" + assignment + "' is not key=value", 0);
  }
  Insert(config, Trim(assignment.substr(0, eq)), Trim(assignment.substr(eq + 1)), 0, true);
}

std::string FormatConfig(const ConfigMap& config) {
  std::ostringstream out;
  for (const auto& [key, s] : config) out << key << " = " << s.value << '\n';
  return out.str();
}

namespace {

std::shared_ptr<const Problem> BuildProblem(const ConfigMap& c) {
  const std::string& kind = Str(c, "problem");
  const std::size_t nodes = Count(c, "nodes", 1);
  const double sigma = Num(c, "sigma");
  if (sigma < 0.0) BadValue(c, "sigma", "must be >= 0");
  if (kind == "counterexample") {
    const DenseVector x0 = Str(c, "x0").empty() ? DenseVector{0.0, -0.01} : Vector(c, "x0", 2);
    const double L = Num(c, "L");
    if (!(L > 0.0)) BadValue(c, "L", "must be positive");
    return std::make_shared<CounterexampleProblem>(L, sigma, nodes, x0);
  }
  if (kind == "quadratic") {
    QuadraticTask task;
    if (!Str(c, "task_file").empty()) {
      task = LoadQuadraticTask(Str(c, "task_file"));
    } else {
      const std::size_t d = Count(c, "dim", 2);
      const double lambda = Num(c, "lambda");
      if (lambda < 0.0) BadValue(c, "lambda", "must be >= 0");
      const double s = Num(c, "scale");
      if (s < 0.0) BadValue(c, "scale", "must be >= 0");
      task = GenerateQuadratic(nodes, d, lambda, s, U64(c, "task_seed"));
    }
    if (!Str(c, "x0").empty()) task.x0 = Vector(c, "x0", task.dim());
    return std::make_shared<QuadraticProblem>(std::move(task), sigma);
  }
  if (kind == "logreg") {
    const std::size_t classes = Count(c, "classes", 2);
    const std::size_t features = Count(c, "features", 1);
    const double reg = Num(c, "reg");
    if (reg < 0.0) BadValue(c, "reg", "must be >= 0");
    const std::string& split = Str(c, "split");
    SplitPolicy policy;
    if (split == "by_label") {
      policy = SplitPolicy::kByLabel;
    } else if (split == "random") {
      policy = SplitPolicy::kRandom;
    } else {
      BadValue(c, "split", "expected by_label or random");
    }
    Dataset data;
    if (Str(c, "data") == "blobs") {
      data = GenerateBlobs(classes, features, Count(c, "blob_examples", 1), U64(c, "blob_seed"),
                           Num(c, "blob_separation"));
    } else {
      data = ReadLibsvm(Str(c, "data"), classes, features);
    }
    if (!Str(c, "x0").empty()) BadValue(c, "x0", "logreg always starts from zero");
    return std::make_shared<LogRegProblem>(
        SplitDataset(data, nodes, policy, U64(c, "split_seed"), reg));
  }
  BadValue(c, "problem", "expected counterexample, quadratic or logreg");
}

CompressorSpec BuildCompressor(const ConfigMap& c, std::size_t dim) {
  const std::string& kind = Str(c, "compressor");
  try {
    if (kind == "topk") return CompressorSpec::TopK(Count(c, "k", 1), dim);
    if (kind == "randk") return CompressorSpec::RandK(Count(c, "k", 1), dim);
    if (kind == "identity") return CompressorSpec::Identity(dim);
    if (kind == "threshold") return CompressorSpec::HardThreshold(Num(c, "threshold"), dim);
  } catch (const InvalidArgument& e) {
    BadValue(c, kind == "threshold" ? "threshold" : "k", e.what());
  }
  BadValue(c, "compressor", "expected topk, randk, identity or threshold");
}

}  // namespace

Experiment BuildExperiment(const ConfigMap& input) {
  Experiment exp;
  exp.config = input;
  FillDefaults(exp.config);
  const ConfigMap& c = exp.config;
  exp.name = Str(c, "name");
  if (exp.name.empty() || exp.name.find('/') != std::string::npos) {
    BadValue(c, "name", "must be a non-empty file name");
  }
  exp.problem = BuildProblem(c);
  exp.compressor = BuildCompressor(c, exp.problem->dim());
  try {
    exp.seeds = ParseSeeds(Str(c, "seeds"));
  } catch (const InvalidArgument& e) {
    BadValue(c, "seeds", e.what());
  }
  exp.metric_every = Count(c, "metric_every", 1);
  exp.lyapunov = Bool(c, "lyapunov");
  exp.out_dir = (fs::path(Str(c, "out")) / exp.name).string();
  exp.tune = Str(c, "tune");
  if (exp.tune != "none" && exp.tune != "sweep") BadValue(c, "tune", "expected none or sweep");
  exp.sweep_k_lo = static_cast<int>(Int(c, "sweep_k_lo"));
  exp.sweep_k_hi = static_cast<int>(Int(c, "sweep_k_hi"));
  if (exp.sweep_k_lo > exp.sweep_k_hi) BadValue(c, "sweep_k_hi", "must be >= sweep_k_lo");
  try {
    exp.sweep_criterion = ParseSweepCriterion(Str(c, "sweep_criterion"));
  } catch (const InvalidArgument& e) {
    BadValue(c, "sweep_criterion", e.what());
  }
  exp.desk_scaling = Str(c, "desk_scaling");

  HyperParams base;
  base.batch = Count(c, "batch", 1);
  base.batch_init = Count(c, "batch_init", 1);
  base.rounds = Count(c, "rounds", 0);
  try {
    base.schedule = ParseSchedule(Str(c, "schedule"));
  } catch (const InvalidArgument& e) {
    BadValue(c, "schedule", e.what());
  }
  const std::string& mode = Str(c, "params");
  if (mode != "manual" && mode != "theory") BadValue(c, "params", "expected manual or theory");

  if (Str(c, "delta0").empty()) {
    exp.delta0 = ObjectiveGap(*exp.problem, exp.problem->x0());
  } else {
    exp.delta0 = Num(c, "delta0");
  }

  const auto names = SplitList(Str(c, "algorithms"));
  if (names.empty()) BadValue(c, "algorithms", "needs at least one algorithm");
  for (const auto& name : names) {
    AlgorithmPlan plan{};
    try {
      plan.kind = ParseAlgorithm(name);
    } catch (const InvalidArgument& e) {
      BadValue(c, "algorithms", e.what());
    }
    for (const auto& other : exp.plans) {
      if (other.kind == plan.kind) BadValue(c, "algorithms", "lists " + name + " twice");
    }
    try {
      CheckCompatible(plan.kind, exp.compressor);
    } catch (const InvalidArgument& e) {
      BadValue(c, "compressor", e.what());
    }
    const std::string tag = AlgorithmName(plan.kind);
    const std::string gkey = c.count("gamma." + tag) ? "gamma." + tag : "gamma";
    const std::string ekey = c.count("eta." + tag) ? "eta." + tag : "eta";
    plan.params = base;
    plan.params.gamma = Num(c, gkey);
    plan.params.eta = Num(c, ekey);
    if (mode == "theory") {
      TheoryInputs in;
      in.smoothness = exp.problem->Smoothness();
      in.alpha = ContractionAlpha(exp.compressor);
      in.delta = AbsoluteDelta(exp.compressor);
      in.sigma = Num(c, "sigma");
      in.n = exp.problem->nodes();
      in.T = std::max<std::size_t>(base.rounds, 1);
      in.delta0 = exp.delta0;
      try {
        plan.params = TheoreticalParams(plan.kind, in, base);
      } catch (const InvalidArgument& e) {
        BadValue(c, "params", e.what());
      }
      plan.params.rounds = base.rounds;
      plan.theory = true;
    }
    try {
      plan.params.Validate();
    } catch (const InvalidArgument& e) {
      BadValue(c, plan.params.gamma > 0.0 ? ekey : gkey, e.what());
    }
    exp.plans.push_back(plan);
  }
  return exp;
}

namespace {

RunConfig MakeRunConfig(const Experiment& exp, const AlgorithmPlan& plan) {
  RunConfig cfg;
  cfg.problem = exp.problem;
  cfg.algorithm = plan.kind;
  cfg.compressor = exp.compressor;
  cfg.params = plan.params;
  cfg.metric_every = exp.metric_every;
  cfg.seeds = exp.seeds;
  cfg.lyapunov = exp.lyapunov && HasMomentum(plan.kind);
  return cfg;
}

json OptionalNumber(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::vector<RunSummary> RunExperiment(const Experiment& exp, std::size_t workers,
                                      bool verbose) {
  fs::create_directories(exp.out_dir);
  const SmoothnessInfo sm = exp.problem->Smoothness();

  json manifest;
  manifest["tool"] = "efsim";
  manifest["version"] = "0.1.0";
  manifest["name"] = exp.name;
  json config = json::object();
  for (const auto& [key, s] : exp.config) config[key] = s.value;
  manifest["config"] = config;
  manifest["seeds"] = exp.seeds;
  manifest["desk_scaling"] = exp.desk_scaling;
  manifest["problem"] = {
      {"name", exp.problem->name()},
      {"dim", exp.problem->dim()},
      {"nodes", exp.problem->nodes()},
      {"L", sm.L},
      {"L_tilde", sm.L_tilde},
      {"ell_tilde", OptionalNumber(sm.ell_tilde)},
      {"f_star", OptionalNumber(sm.f_star)},
      {"smoothness_is_upper_bound", sm.upper_bound},
      {"delta0", exp.delta0},
  };
  manifest["compressor"] = {
      {"spec", exp.compressor.ToString()},
      {"alpha", OptionalNumber(ContractionAlpha(exp.compressor))},
      {"delta", OptionalNumber(AbsoluteDelta(exp.compressor))},
      {"bits_per_coordinate", kBitsPerCoordinate},
      {"bits_model", "32-bit index + 64-bit value per transmitted coordinate"},
  };
  json runs = json::array();
  std::vector<RunSummary> summaries;

  for (AlgorithmPlan plan : exp.plans) {
    const std::string tag = AlgorithmName(plan.kind);
    json run;
    run["algorithm"] = tag;
    if (exp.tune == "sweep") {
      RunConfig tmpl = MakeRunConfig(exp, plan);
      const SweepResult sweep =
          Sweep(tmpl, exp.sweep_k_lo, exp.sweep_k_hi, exp.sweep_criterion, workers);
      plan.params.gamma = sweep.best_point().gamma;
      std::ostringstream table;
      table << "k,gamma,score,diverged\n";
      json points = json::array();
      for (const auto& p : sweep.table) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%d\n", p.k, p.gamma, p.score,
                      p.diverged ? 1 : 0);
        table << buf;
      }
      const std::string file = tag + "_sweep.csv";
      WriteFileAtomic((fs::path(exp.out_dir) / file).string(), table.str());
      run["sweep"] = {{"criterion", SweepCriterionName(exp.sweep_criterion)},
                      {"k_lo", exp.sweep_k_lo},
                      {"k_hi", exp.sweep_k_hi},
                      {"best_k", sweep.best_point().k},
                      {"file", file}};
      if (verbose) {
        std::cout << exp.name << " " << tag << ": tuned gamma = 2^" << sweep.best_point().k
                  << "\n";
      }
    }
    const RunConfig cfg = MakeRunConfig(exp, plan);
    const QuantileResult res = RunQuantiles(cfg, workers);
    run["params"] = {{"gamma", plan.params.gamma},
                     {"eta", plan.params.eta},
                     {"batch", plan.params.batch},
                     {"batch_init", plan.params.batch_init},
                     {"rounds", plan.params.rounds},
                     {"schedule", ScheduleName(plan.params.schedule)},
                     {"source", plan.theory ? "theory" : (exp.tune == "sweep" ? "sweep" : "manual")}};
    run["lyapunov"] = cfg.lyapunov;
    json traces = json::array();
    RunSummary summary{tag, 0, res.traces.size()};
    for (const auto& tr : res.traces) {
      const std::string file = tag + "_seed" + std::to_string(tr.seed) + ".csv";
      WriteTraceCsv(tr, (fs::path(exp.out_dir) / file).string());
      json t = {{"seed", tr.seed}, {"file", file}, {"diverged", tr.diverged()}};
      if (tr.diverged()) {
        ++summary.diverged_seeds;
        t["failure_round"] = *tr.failure_round;
        t["failure_reason"] = tr.failure_reason;
      }
      if (!tr.rows.empty()) {
        const auto& last = tr.rows.back();
        t["final_t"] = last.t;
        t["final_grad_norm"] = last.grad_norm;
        t["final_obj_gap"] = last.obj_gap;
        t["coords_sent"] = last.coords_cum;
        t["bits_sent"] = last.coords_cum * kBitsPerCoordinate;
      }
      traces.push_back(t);
    }
    const std::string qfile = tag + "_quantiles.csv";
    WriteQuantilesCsv(res.rows, (fs::path(exp.out_dir) / qfile).string());
    run["traces"] = traces;
    run["quantiles"] = qfile;
    run["obj_gap_is_shifted"] = !sm.f_star.has_value();
    runs.push_back(run);
    if (verbose && !res.rows.empty()) {
      const auto& last = res.rows.back();
      std::printf("%s %s: t=%zu median grad_norm=%.6g median obj_gap=%.6g diverged=%zu/%zu\n",
                  exp.name.c_str(), tag.c_str(), last.t, last.grad_norm[1], last.obj_gap[1],
                  summary.diverged_seeds, summary.total_seeds);
    }
    summaries.push_back(summary);
  }
  manifest["runs"] = runs;
  WriteFileAtomic((fs::path(exp.out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
  return summaries;
}

std::vector<std::string> PresetNames() {
  return {"fig1", "fig5", "speedup", "quad3", "mnist_small"};
}

namespace {

ConfigMap FromPairs(std::initializer_list<std::pair<const char*, std::string>> pairs) {
  ConfigMap c;
  for (const auto& [k, v] : pairs) Insert(c, k, v, 0, true);
  return c;
}

ConfigMap Fig1Base() {
  return FromPairs({
      {"problem", "counterexample"},
      {"nodes", "1"},
      {"L", "1"},
      {"sigma", "1"},
      {"x0", "0,-0.01"},
      {"algorithms", "EF21SGD,EF21SGDM"},
      {"compressor", "topk"},
      {"k", "1"},
      {"gamma", "0.001"},
      {"eta", "0.001"},
      {"batch", "1"},
      {"batch_init", "1"},
      {"rounds", "10000"},
      {"seeds", "0..9"},
      {"metric_every", "100"},
  });
}

}  // namespace

std::vector<ConfigMap> Preset(const std::string& name) {
  if (name == "fig1") {
    ConfigMap c = Fig1Base();
    Insert(c, "name", "fig1", 0, true);
    Insert(c, "desk_scaling", "none; T = 10000 inferred from gamma = eta = 0.1/sqrt(T)", 0, true);
    return {c};
  }
  if (name == "fig5") {
    ConfigMap c = Fig1Base();
    Insert(c, "name", "fig5", 0, true);
    Insert(c, "schedule", "inv_sqrt_t", 0, true);
    Insert(c, "gamma", "1", 0, true);
    Insert(c, "eta", "0.1", 0, true);
    Insert(c, "desk_scaling", "none; gamma_t = eta_t = 0.1/sqrt(t+1)", 0, true);
    return {c};
  }
  if (name == "speedup") {
    std::vector<ConfigMap> out;
    for (const char* n : {"1", "4", "16"}) {
      ConfigMap c = Fig1Base();
      Insert(c, "name", std::string("speedup_n") + n, 0, true);
      Insert(c, "nodes", n, 0, true);
      Insert(c, "desk_scaling", "none; every node holds the same f with independent noise", 0,
             true);
      out.push_back(c);
    }
    return out;
  }
  if (name == "quad3") {
    std::vector<ConfigMap> out;
    for (const char* sigma : {"0.001", "0.01"}) {
      ConfigMap c = FromPairs({
          {"name", std::string("quad3_sigma") + sigma},
          {"problem", "quadratic"},
          {"nodes", "20"},
          {"dim", "100"},
          {"lambda", "0.01"},
          {"scale", "1"},
          {"task_seed", "0"},
          {"sigma", sigma},
          {"algorithms", "EF14SGD,EF21SGDM"},
          {"compressor", "topk"},
          {"k", "5"},
          {"eta", "0.1"},
          {"rounds", "20000"},
          {"seeds", "0..2"},
          {"metric_every", "100"},
          {"tune", "sweep"},
          {"sweep_k_lo", "-20"},
          {"sweep_k_hi", "20"},
          {"desk_scaling", "n = 20, d = 100 instead of n = 100, d = 1000; Top5"},
      });
      out.push_back(c);
    }
    return out;
  }
  if (name == "mnist_small") {
    return {FromPairs({
        {"name", "mnist_small"},
        {"problem", "logreg"},
        {"data", "blobs"},
        {"classes", "10"},
        {"features", "20"},
        {"blob_examples", "2000"},
        {"blob_separation", "1"},
        {"nodes", "10"},
        {"split", "by_label"},
        {"reg", "0.001"},
        {"sigma", "1"},
        {"algorithms", "EF21SGD,EF21SGDM,EF14SGD"},
        {"compressor", "topk"},
        {"k", "2"},
        {"eta", "0.1"},
        {"batch", "1"},
        {"rounds", "2000"},
        {"seeds", "0..2"},
        {"metric_every", "20"},
        {"tune", "sweep"},
        {"sweep_k_lo", "-10"},
        {"sweep_k_hi", "4"},
        {"desk_scaling",
         "synthetic 10-class Gaussian blobs (l = 20, 2000 examples, d = 210) replace MNIST; "
         "Top2 keeps alpha near the published K/d"},
    })};
  }
  throw InvalidArgument("unknown preset '" + name + "' (expected fig1, fig5, speedup, quad3 or mnist_small)");
}

}  // namespace efsim::cli
