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

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "efsim/counterexample.hpp"
#include "efsim/error.hpp"

namespace efsim {

void RunConfig::Validate() const {
  if (!problem) throw InvalidArgument("run config has no problem");
  if (metric_every < 1) throw InvalidArgument("metric_every must be >= 1");
  if (seeds.empty()) throw InvalidArgument("run config needs at least one seed");
  params.Validate();
  CheckCompatible(algorithm, compressor);
  if (compressor.dim != problem->dim()) {
    throw DimensionMismatch(problem->dim(), compressor.dim, "compressor");
  }
  if (lyapunov && !HasMomentum(algorithm)) {
    throw InvalidArgument("the Lyapunov diagnostic needs v_i, which " +
                          AlgorithmName(algorithm) + " does not keep");
  }
}

double ObjectiveGap(const Problem& problem, const DenseVector& x) {
  const double f = problem.Value(x);
  const auto f_star = problem.Smoothness().f_star;
  return f_star ? f - *f_star : f;
}

double LyapunovAlpha(const CompressorSpec& compressor) {
  return ContractionAlpha(compressor).value_or(1.0);
}

double Lyapunov(const Problem& problem, const AlgorithmState& state, double gamma,
                double eta, double alpha) {
  const std::size_t n = state.nodes.size();
  const std::size_t d = problem.dim();
  double gv = 0.0;
  double vg = 0.0;
  DenseVector mean_err(d);
  for (std::size_t i = 0; i < n; ++i) {
    const NodeState& node = state.nodes[i];
    if (!node.v) {
      throw InvalidArgument("Lyapunov needs v_i; " + AlgorithmName(state.kind) +
                            " does not keep it");
    }
    gv += NormSq(node.g - *node.v);
    const DenseVector err = *node.v - problem.NodeGradient(i, state.server.x);
    vg += NormSq(err);
    mean_err += err;
  }
  const double nn = static_cast<double>(n);
  mean_err *= 1.0 / nn;
  return ObjectiveGap(problem, state.server.x) + gamma / (alpha * nn) * gv +
         gamma * eta / (alpha * alpha * nn) * vg + gamma / eta * NormSq(mean_err);
}

RunTrace Run(const RunConfig& config, std::uint64_t seed) {
  config.Validate();
  const Problem& problem = *config.problem;
  const HyperParams& hp = config.params;
  RunTrace trace;
  trace.algorithm = AlgorithmName(config.algorithm);
  trace.seed = seed;
  trace.shifted = !problem.Smoothness().f_star.has_value();
  const double alpha = LyapunovAlpha(config.compressor);

  RoundLog log;
  AlgorithmState state;
  try {
    state = Init(config.algorithm, problem, hp, config.compressor, seed, &log);
  } catch (const NumericFailure& e) {
    trace.failure_round = 0;
    trace.failure_reason = e.what();
    return trace;
  }
  std::uint64_t coords = 0;
  std::uint64_t samples = log.samples;
  double gap0 = 0.0;

  // Returns false when the run must stop.
  auto record = [&](std::size_t t) {
    MetricsRecord r;
    r.t = t;
    r.coords_cum = coords;
    r.samples_cum = samples;
    r.grad_norm = Norm(problem.Gradient(state.server.x));
    r.obj_gap = ObjectiveGap(problem, state.server.x);
    if (config.lyapunov) {
      r.lyapunov = Lyapunov(problem, state, hp.GammaAt(t), hp.EtaAt(t), alpha);
    }
    const bool finite = std::isfinite(r.grad_norm) && std::isfinite(r.obj_gap) &&
                        (!r.lyapunov || std::isfinite(*r.lyapunov));
    if (!finite) {
      trace.failure_round = t;
      trace.failure_reason = "non-finite metric";
      return false;
    }
    if (t == 0) gap0 = r.obj_gap;
    trace.rows.push_back(r);
    const double limit = kDivergenceFactor * std::max(std::abs(gap0), 1e-300);
    if (t > 0 && r.obj_gap > limit) {
      trace.failure_round = t;
      trace.failure_reason = "objective gap exceeded divergence limit";
      return false;
    }
    return true;
  };

  if (!record(0)) return trace;
  for (std::size_t t = 1; t <= hp.rounds; ++t) {
    try {
      log = Round(state, problem, hp, config.compressor);
    } catch (const NumericFailure& e) {
      trace.failure_round = t;
      trace.failure_reason = e.what();
      return trace;
    }
    coords += log.coords_sent;
    samples += log.samples;
    if (t % config.metric_every == 0 || t == hp.rounds) {
      if (!record(t)) return trace;
    }
  }
  return trace;
}

double Quantile(std::vector<double> values, double q) {
  if (values.empty()) throw InvalidArgument("quantile of an empty set");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

std::vector<QuantileRow> TraceQuantiles(const std::vector<RunTrace>& traces) {
  std::map<std::size_t, std::vector<const MetricsRecord*>> by_t;
  for (const auto& tr : traces) {
    for (const auto& r : tr.rows) by_t[r.t].push_back(&r);
  }
  constexpr double kQ[3] = {0.25, 0.5, 0.75};
  std::vector<QuantileRow> out;
  for (const auto& [t, rows] : by_t) {
    QuantileRow q;
    q.t = t;
    q.count = rows.size();
    std::vector<double> coords, samples, gn, gap, lyap;
    for (const auto* r : rows) {
      coords.push_back(static_cast<double>(r->coords_cum));
      samples.push_back(static_cast<double>(r->samples_cum));
      gn.push_back(r->grad_norm);
      gap.push_back(r->obj_gap);
      if (r->lyapunov) lyap.push_back(*r->lyapunov);
    }
    q.coords_cum = Quantile(coords, 0.5);
    q.samples_cum = Quantile(samples, 0.5);
    for (int k = 0; k < 3; ++k) {
      q.grad_norm[k] = Quantile(gn, kQ[k]);
      q.obj_gap[k] = Quantile(gap, kQ[k]);
      if (!lyap.empty()) q.lyapunov[k] = Quantile(lyap, kQ[k]);
    }
    out.push_back(q);
  }
  return out;
}

namespace {

// Runs job(i) for i in [0, count) on up to `workers` threads.
template <typename Job>
void ParallelFor(std::size_t count, std::size_t workers, Job job) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          job(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

QuantileResult RunQuantiles(const RunConfig& config, std::size_t workers) {
  config.Validate();
  QuantileResult result;
  result.traces.resize(config.seeds.size());
  ParallelFor(config.seeds.size(), workers,
              [&](std::size_t i) { result.traces[i] = Run(config, config.seeds[i]); });
  result.rows = TraceQuantiles(result.traces);
  return result;
}

Theorem1Report Theorem1Check(double L, double sigma, double gamma, std::size_t n,
                             std::size_t B, std::size_t T,
                             const std::vector<std::uint64_t>& seeds,
                             const DenseVector& x0, std::size_t workers) {
  if (!(gamma > 0.0) || gamma > 1.0 / L) {
    throw InvalidArgument("theorem1_check requires 0 < gamma <= 1/L");
  }
  if (x0.dim() != 2 || x0[0] != 0.0 || !(x0[1] < 0.0)) {
    throw InvalidArgument("theorem1_check requires x0 = (0, x2) with x2 < 0");
  }
  if (seeds.empty()) throw InvalidArgument("theorem1_check needs seeds");
  RunConfig cfg;
  cfg.problem = std::make_shared<CounterexampleProblem>(L, sigma, n, x0);
  cfg.algorithm = AlgorithmKind::kEF21SGD_IDEAL;
  cfg.compressor = CompressorSpec::TopK(1, 2);
  cfg.params.gamma = gamma;
  cfg.params.eta = 1.0;
  cfg.params.batch = B;
  cfg.params.batch_init = B;
  cfg.params.rounds = T;
  cfg.metric_every = std::max<std::size_t>(T, 1);
  cfg.seeds = seeds;
  const QuantileResult res = RunQuantiles(cfg, workers);

  Theorem1Report rep;
  std::vector<double> v;
  for (const auto& tr : res.traces) {
    if (tr.diverged() || tr.rows.back().t != T) {
      throw NumericFailure("theorem1_check run diverged", static_cast<std::int64_t>(
                                                              tr.failure_round.value_or(0)));
    }
    const double g = tr.rows.back().grad_norm;
    v.push_back(g * g);
  }
  const double m = static_cast<double>(v.size());
  double sum = 0.0;
  for (double x : v) sum += x;
  rep.lhs = sum / m;
  double ss = 0.0;
  for (double x : v) ss += (x - rep.lhs) * (x - rep.lhs);
  rep.lhs_stderr = v.size() > 1 ? std::sqrt(ss / (m - 1.0) / m) : 0.0;
  const double g0 = L * Norm(x0);
  rep.rhs = std::min(sigma * sigma / static_cast<double>(B), g0 * g0) / 60.0;
  rep.pass = rep.lhs >= rep.rhs;
  return rep;
}

SweepCriterion ParseSweepCriterion(const std::string& text) {
  if (text == "final_loss") return SweepCriterion::kFinalLoss;
  if (text == "final_grad_norm") return SweepCriterion::kFinalGradNorm;
  throw InvalidArgument("unknown sweep criterion '" + text +
                        "' (expected final_loss or final_grad_norm)");
}

std::string SweepCriterionName(SweepCriterion c) {
  return c == SweepCriterion::kFinalLoss ? "final_loss" : "final_grad_norm";
}

SweepResult Sweep(const RunConfig& config_template, int k_lo, int k_hi,
                  SweepCriterion criterion, std::size_t workers) {
  if (k_lo > k_hi) throw InvalidArgument("sweep grid is empty");
  config_template.Validate();
  const std::size_t points = static_cast<std::size_t>(k_hi - k_lo + 1);
  const std::size_t seeds = config_template.seeds.size();
  std::vector<RunTrace> traces(points * seeds);
  ParallelFor(points * seeds, workers, [&](std::size_t job) {
    RunConfig cfg = config_template;
    cfg.params.gamma = std::ldexp(1.0, k_lo + static_cast<int>(job / seeds));
    cfg.metric_every = std::max<std::size_t>(cfg.params.rounds, 1);
    cfg.lyapunov = false;
    traces[job] = Run(cfg, cfg.seeds[job % seeds]);
  });
  SweepResult result;
  bool any = false;
  for (std::size_t p = 0; p < points; ++p) {
    SweepPoint pt;
    pt.k = k_lo + static_cast<int>(p);
    pt.gamma = std::ldexp(1.0, pt.k);
    double sum = 0.0;
    for (std::size_t s = 0; s < seeds; ++s) {
      const RunTrace& tr = traces[p * seeds + s];
      if (tr.diverged() || tr.rows.empty() ||
          tr.rows.back().t != config_template.params.rounds) {
        pt.diverged = true;
        break;
      }
      const auto& last = tr.rows.back();
      sum += criterion == SweepCriterion::kFinalLoss ? last.obj_gap : last.grad_norm;
    }
    pt.score = pt.diverged ? INFINITY : sum / static_cast<double>(seeds);
    if (!pt.diverged && (!any || pt.score < result.table[result.best].score)) {
      result.best = result.table.size();
      any = true;
    }
    result.table.push_back(pt);
  }
  if (!any) throw NumericFailure("every sweep grid point diverged", -1);
  return result;
}

void WriteFileAtomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot open '" + tmp + "' for writing");
    out << contents;
    if (!out) throw Error("write to '" + tmp + "' failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw Error("cannot rename '" + tmp + "' to '" + path + "'");
  }
}

namespace {

std::string Fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string FmtOpt(const std::optional<double>& v) { return v ? Fmt(*v) : std::string(); }

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

void WriteTraceCsv(const RunTrace& trace, const std::string& path) {
  std::ostringstream out;
  out << kTraceHeader << '\n';
  for (const auto& r : trace.rows) {
    out << r.t << ',' << r.coords_cum << ',' << r.samples_cum << ',' << Fmt(r.grad_norm)
        << ',' << Fmt(r.obj_gap) << ',' << FmtOpt(r.lyapunov) << '\n';
  }
  WriteFileAtomic(path, out.str());
}

RunTrace ReadTraceCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open trace '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty trace file", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader) throw ParseError("unexpected trace header '" + line + "'", 1);
  RunTrace trace;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = SplitCsv(line);
    if (f.size() != 6) throw ParseError("expected 6 fields", line_no);
    MetricsRecord r;
    try {
      std::size_t pos = 0;
      r.t = std::stoull(f[0], &pos);
      if (pos != f[0].size()) throw std::invalid_argument(f[0]);
      r.coords_cum = std::stoull(f[1], &pos);
      if (pos != f[1].size()) throw std::invalid_argument(f[1]);
      r.samples_cum = std::stoull(f[2], &pos);
      if (pos != f[2].size()) throw std::invalid_argument(f[2]);
      r.grad_norm = std::stod(f[3], &pos);
      if (pos != f[3].size()) throw std::invalid_argument(f[3]);
      r.obj_gap = std::stod(f[4], &pos);
      if (pos != f[4].size()) throw std::invalid_argument(f[4]);
      if (!f[5].empty()) {
        r.lyapunov = std::stod(f[5], &pos);
        if (pos != f[5].size()) throw std::invalid_argument(f[5]);
      }
    } catch (const std::invalid_argument&) {
      throw ParseError("malformed trace field", line_no);
    } catch (const std::out_of_range&) {
      throw ParseError("trace field out of range", line_no);
    }
    trace.rows.push_back(r);
  }
  return trace;
}

void WriteQuantilesCsv(const std::vector<QuantileRow>& rows, const std::string& path) {
  std::ostringstream out;
  out << "t,count,coords_cum,samples_cum,grad_norm_q25,grad_norm_median,grad_norm_q75,"
         "obj_gap_q25,obj_gap_median,obj_gap_q75,lyapunov_q25,lyapunov_median,lyapunov_q75\n";
  for (const auto& r : rows) {
    out << r.t << ',' << r.count << ',' << Fmt(r.coords_cum) << ',' << Fmt(r.samples_cum);
    for (double v : r.grad_norm) out << ',' << Fmt(v);
    for (double v : r.obj_gap) out << ',' << Fmt(v);
    for (const auto& v : r.lyapunov) out << ',' << FmtOpt(v);
    out << '\n';
  }
  WriteFileAtomic(path, out.str());
}

}  // namespace efsim
