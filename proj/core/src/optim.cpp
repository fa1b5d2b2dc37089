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

#include "efsim/optim.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "efsim/error.hpp"
#include "efsim/rng.hpp"

namespace efsim {

namespace {

struct NamedKind {
  AlgorithmKind kind;
  const char* name;
};

constexpr NamedKind kKinds[] = {
    {AlgorithmKind::kSGD, "SGD"},
    {AlgorithmKind::kSGDM, "SGDM"},
    {AlgorithmKind::kEF14SGD, "EF14SGD"},
    {AlgorithmKind::kEF21SGD, "EF21SGD"},
    {AlgorithmKind::kEF21SGDM, "EF21SGDM"},
    {AlgorithmKind::kEF21SGD2M, "EF21SGD2M"},
    {AlgorithmKind::kEF21SGDM_ABS, "EF21SGDM_ABS"},
    {AlgorithmKind::kEF21STORM, "EF21STORM"},
    {AlgorithmKind::kEF21SGD_IDEAL, "EF21SGD_IDEAL"},
    {AlgorithmKind::kEF21SGDM_IDEAL, "EF21SGDM_IDEAL"},
};

std::string Canonical(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '-' || c == '_') continue;
    out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace

std::string AlgorithmName(AlgorithmKind kind) {
  for (const auto& k : kKinds) {
    if (k.kind == kind) return k.name;
  }
  return "UNKNOWN";
}

AlgorithmKind ParseAlgorithm(std::string_view text) {
  const std::string key = Canonical(text);
  for (const auto& k : kKinds) {
    if (Canonical(k.name) == key) return k.kind;
  }
  throw InvalidArgument("unknown algorithm '" + std::string(text) + "'");
}

std::vector<AlgorithmKind> AllAlgorithms() {
  std::vector<AlgorithmKind> out;
  for (const auto& k : kKinds) out.push_back(k.kind);
  return out;
}

bool HasMomentum(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::kSGDM:
    case AlgorithmKind::kEF21SGDM:
    case AlgorithmKind::kEF21SGD2M:
    case AlgorithmKind::kEF21SGDM_ABS:
    case AlgorithmKind::kEF21SGDM_IDEAL:
      return true;
    default:
      return false;
  }
}

bool IsIdealized(AlgorithmKind kind) {
  return kind == AlgorithmKind::kEF21SGD_IDEAL || kind == AlgorithmKind::kEF21SGDM_IDEAL;
}

void CheckCompatible(AlgorithmKind kind, const CompressorSpec& compressor) {
  compressor.Validate();
  const std::string name = AlgorithmName(kind);
  switch (kind) {
    case AlgorithmKind::kSGD:
    case AlgorithmKind::kSGDM:
      if (compressor.kind != CompressorKind::kIdentity) {
        throw InvalidArgument(name + " is uncompressed and requires the identity compressor, got " +
                              compressor.ToString());
      }
      return;
    case AlgorithmKind::kEF21SGDM_ABS:
      if (!compressor.is_absolute()) {
        throw InvalidArgument(name + " requires an absolute compressor, got " +
                              compressor.ToString());
      }
      return;
    default:
      if (!compressor.is_contractive()) {
        throw InvalidArgument(name + " requires a contractive compressor, got " +
                              compressor.ToString());
      }
      return;
  }
}

std::string ScheduleName(Schedule s) {
  switch (s) {
    case Schedule::kConstant: return "constant";
    case Schedule::kInvSqrtT: return "inv_sqrt_t";
    case Schedule::kInvSqrtBigT: return "inv_sqrt_T";
  }
  return "unknown";
}

Schedule ParseSchedule(std::string_view text) {
  if (text == "constant") return Schedule::kConstant;
  if (text == "inv_sqrt_t") return Schedule::kInvSqrtT;
  if (text == "inv_sqrt_T") return Schedule::kInvSqrtBigT;
  throw InvalidArgument("unknown schedule '" + std::string(text) +
                        "' (expected constant, inv_sqrt_t or inv_sqrt_T)");
}

double HyperParams::EtaAt(std::size_t t) const {
  switch (schedule) {
    case Schedule::kConstant: return eta;
    case Schedule::kInvSqrtT: return eta / std::sqrt(static_cast<double>(t + 1));
    case Schedule::kInvSqrtBigT:
      return eta / std::sqrt(static_cast<double>(std::max<std::size_t>(rounds, 1)));
  }
  return eta;
}

double HyperParams::GammaAt(std::size_t t) const {
  if (schedule == Schedule::kConstant) return gamma;
  return gamma * EtaAt(t);
}

void HyperParams::Validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InvalidArgument("step size gamma must be positive and finite");
  }
  if (!(eta > 0.0 && eta <= 1.0)) throw InvalidArgument("momentum eta must lie in (0, 1]");
  if (batch < 1) throw InvalidArgument("batch size must be >= 1");
  if (batch_init < 1) throw InvalidArgument("initial batch size must be >= 1");
}

namespace {

// a * x + b * y, entrywise.
DenseVector LinComb(double a, const DenseVector& x, double b, const DenseVector& y) {
  DenseVector out(x.dim());
  for (std::size_t j = 0; j < x.dim(); ++j) out[j] = a * x[j] + b * y[j];
  return out;
}

// g <- g + C(target - g). Identity sets g to target exactly.
std::size_t CompressedStep(const CompressorSpec& spec, const DenseVector& target,
                           DenseVector& g, RngStream& rng) {
  if (spec.kind == CompressorKind::kIdentity) {
    g = target;
    return target.dim();
  }
  const CompressedVector c = Compress(spec, target - g, rng);
  AddCompressed(c, 1.0, g);
  return CoordinatesSent(c);
}

DenseVector NodeAverage(const std::vector<NodeState>& nodes) {
  DenseVector g(nodes.front().g.dim());
  for (const auto& node : nodes) g += node.g;
  g *= 1.0 / static_cast<double>(nodes.size());
  return g;
}

void CheckNodeFinite(const NodeState& node, std::size_t i, std::int64_t round) {
  const std::string tag = "node " + std::to_string(i) + " ";
  RequireFinite(node.g, tag + "g", round);
  if (node.v) RequireFinite(*node.v, tag + "v", round);
  if (node.u) RequireFinite(*node.u, tag + "u", round);
  if (node.w) RequireFinite(*node.w, tag + "w", round);
  if (node.e) RequireFinite(*node.e, tag + "e", round);
}

}  // namespace

DenseVector StormUpdate(const DenseVector& w, const DenseVector& s_new,
                        const DenseVector& s_old, double eta) {
  RequireSameDim(w, s_new, "StormUpdate");
  RequireSameDim(w, s_old, "StormUpdate");
  DenseVector out(w.dim());
  for (std::size_t j = 0; j < w.dim(); ++j) {
    out[j] = s_new[j] + (1.0 - eta) * (w[j] - s_old[j]);
  }
  return out;
}

AlgorithmState Init(AlgorithmKind kind, const Problem& problem,
                    const HyperParams& params, const CompressorSpec& compressor,
                    std::uint64_t seed, RoundLog* log) {
  CheckCompatible(kind, compressor);
  params.Validate();
  if (compressor.dim != problem.dim()) {
    throw DimensionMismatch(problem.dim(), compressor.dim, "compressor");
  }
  AlgorithmState state;
  state.kind = kind;
  state.seed = seed;
  state.server.x = problem.x0();
  state.server.t = 0;
  const std::size_t n = problem.nodes();
  const std::size_t d = problem.dim();
  state.nodes.resize(n);
  std::size_t samples = 0;
  for (std::size_t i = 0; i < n; ++i) {
    RngStream rng(seed, static_cast<std::uint32_t>(i), 0, StreamPurpose::kSampling);
    NodeState& node = state.nodes[i];
    if (kind == AlgorithmKind::kEF14SGD) {
      node.g = DenseVector(d);
      node.e = DenseVector(d);
      node.s_cached = problem.StochasticGradient(
          i, state.server.x, problem.DrawSample(i, params.batch, rng));
      samples = params.batch;
      continue;
    }
    DenseVector s = problem.StochasticGradient(
        i, state.server.x, problem.DrawSample(i, params.batch_init, rng));
    samples = params.batch_init;
    if (HasMomentum(kind)) node.v = s;
    if (kind == AlgorithmKind::kEF21SGD2M) node.u = s;
    if (kind == AlgorithmKind::kEF21STORM) {
      node.w = s;
      node.x_prev = state.server.x;
    }
    node.g = std::move(s);
  }
  for (std::size_t i = 0; i < n; ++i) CheckNodeFinite(state.nodes[i], i, 0);
  state.server.g = NodeAverage(state.nodes);
  if (log != nullptr) *log = RoundLog{0, samples};
  return state;
}

RoundLog Round(AlgorithmState& state, const Problem& problem,
               const HyperParams& params, const CompressorSpec& compressor) {
  const AlgorithmKind kind = state.kind;
  const std::size_t t = state.server.t;
  const auto round_id = static_cast<std::int64_t>(t + 1);
  const double gamma = params.GammaAt(t);
  const double eta = params.EtaAt(t);
  const std::size_t n = state.nodes.size();
  const std::size_t d = problem.dim();

  const DenseVector x_old = state.server.x;
  DenseVector x_new = x_old;
  if (kind == AlgorithmKind::kEF14SGD) {
    x_new -= state.server.g;
  } else {
    Axpy(-gamma, state.server.g, x_new);
  }
  RequireFinite(x_new, "iterate", round_id);

  RoundLog log;
  log.samples = kind == AlgorithmKind::kEF21STORM ? 2 * params.batch : params.batch;
  for (std::size_t i = 0; i < n; ++i) {
    NodeState& node = state.nodes[i];
    RngStream rng(state.seed, static_cast<std::uint32_t>(i),
                  static_cast<std::uint32_t>(t + 1), StreamPurpose::kSampling);
    RngStream crng = rng.Substream(StreamPurpose::kCompression);
    const Sample sample = problem.DrawSample(i, params.batch, rng);
    switch (kind) {
      case AlgorithmKind::kSGD: {
        node.g = problem.StochasticGradient(i, x_new, sample);
        log.coords_sent += d;
        break;
      }
      case AlgorithmKind::kSGDM: {
        const DenseVector s = problem.StochasticGradient(i, x_new, sample);
        node.v = LinComb(1.0 - eta, *node.v, eta, s);
        node.g = *node.v;
        log.coords_sent += d;
        break;
      }
      case AlgorithmKind::kEF21SGD: {
        const DenseVector s = problem.StochasticGradient(i, x_new, sample);
        log.coords_sent += CompressedStep(compressor, s, node.g, crng);
        break;
      }
      case AlgorithmKind::kEF21SGDM: {
        const DenseVector s = problem.StochasticGradient(i, x_new, sample);
        node.v = LinComb(1.0 - eta, *node.v, eta, s);
        log.coords_sent += CompressedStep(compressor, *node.v, node.g, crng);
        break;
      }
      case AlgorithmKind::kEF21SGD2M: {
        const DenseVector s = problem.StochasticGradient(i, x_new, sample);
        node.v = LinComb(1.0 - eta, *node.v, eta, s);
        node.u = LinComb(1.0 - eta, *node.u, eta, *node.v);
        log.coords_sent += CompressedStep(compressor, *node.u, node.g, crng);
        break;
      }
      case AlgorithmKind::kEF21SGDM_ABS: {
        const DenseVector s = problem.StochasticGradient(i, x_new, sample);
        node.v = LinComb(1.0 - eta, *node.v, eta, s);
        DenseVector diff = *node.v - node.g;
        diff *= 1.0 / gamma;
        const CompressedVector c = Compress(compressor, diff, crng);
        AddCompressed(c, gamma, node.g);
        log.coords_sent += CoordinatesSent(c);
        break;
      }
      case AlgorithmKind::kEF21STORM: {
        const DenseVector s_new = problem.StochasticGradient(i, x_new, sample);
        const DenseVector s_old = problem.StochasticGradient(i, *node.x_prev, sample);
        node.w = StormUpdate(*node.w, s_new, s_old, eta);
        node.x_prev = x_new;
        log.coords_sent += CompressedStep(compressor, *node.w, node.g, crng);
        break;
      }
      case AlgorithmKind::kEF14SGD: {
        DenseVector& e = *node.e;
        Axpy(gamma, *node.s_cached, e);
        e -= node.g;
        DenseVector s = problem.StochasticGradient(i, x_new, sample);
        DenseVector target = e;
        Axpy(params.GammaAt(t + 1), s, target);
        if (compressor.kind == CompressorKind::kIdentity) {
          node.g = std::move(target);
          log.coords_sent += d;
        } else {
          const CompressedVector c = Compress(compressor, target, crng);
          node.g = Densify(c);
          log.coords_sent += CoordinatesSent(c);
        }
        node.s_cached = std::move(s);
        break;
      }
      case AlgorithmKind::kEF21SGD_IDEAL: {
        const DenseVector s = problem.StochasticGradient(i, x_new, sample);
        if (compressor.kind == CompressorKind::kIdentity) {
          node.g = s;
        } else {
          DenseVector grad = problem.NodeGradient(i, x_new);
          const CompressedVector c = Compress(compressor, s - grad, crng);
          AddCompressed(c, 1.0, grad);
          node.g = std::move(grad);
        }
        log.coords_sent += d;
        break;
      }
      case AlgorithmKind::kEF21SGDM_IDEAL: {
        const DenseVector s = problem.StochasticGradient(i, x_new, sample);
        const DenseVector grad = problem.NodeGradient(i, x_new);
        DenseVector diff = s - grad;
        diff *= eta;
        node.v = grad + diff;
        if (compressor.kind == CompressorKind::kIdentity) {
          node.g = *node.v;
        } else {
          DenseVector g = grad;
          AddCompressed(Compress(compressor, diff, crng), 1.0, g);
          node.g = std::move(g);
        }
        log.coords_sent += d;
        break;
      }
    }
    CheckNodeFinite(node, i, round_id);
  }
  state.server.x = std::move(x_new);
  state.server.g = NodeAverage(state.nodes);
  state.server.t = t + 1;
  return log;
}

DenseVector VirtualIterate(const AlgorithmState& state) {
  if (state.kind != AlgorithmKind::kEF14SGD) {
    throw InvalidArgument("virtual iterate is defined for EF14SGD only");
  }
  DenseVector ebar(state.server.x.dim());
  for (const auto& node : state.nodes) ebar += *node.e;
  ebar *= 1.0 / static_cast<double>(state.nodes.size());
  return state.server.x - ebar;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// (num / den)^p, +inf when den == 0.
double Ratio(double num, double den, double p) {
  if (den == 0.0) return kInf;
  return std::pow(num / den, p);
}

std::size_t CeilBatch(double b) {
  if (!(b > 1.0)) return 1;
  return static_cast<std::size_t>(std::ceil(b));
}

double Require(const std::optional<double>& v, const char* what, AlgorithmKind kind) {
  if (!v) {
    throw InvalidArgument(std::string("theoretical parameters for ") + AlgorithmName(kind) +
                          " need " + what);
  }
  return *v;
}

}  // namespace

HyperParams TheoreticalParams(AlgorithmKind kind, const TheoryInputs& in,
                              const HyperParams& base) {
  const double L = in.smoothness.L;
  const double Lt = in.smoothness.L_tilde > 0.0 ? in.smoothness.L_tilde : L;
  const double s2 = in.sigma * in.sigma;
  const double d0 = in.delta0;
  const double T = static_cast<double>(in.T);
  const double n = static_cast<double>(in.n);
  if (!(L > 0.0)) throw InvalidArgument("theoretical parameters need L > 0");
  if (!(d0 > 0.0)) throw InvalidArgument("theoretical parameters need delta0 > 0");
  if (in.T < 1 || in.n < 1) throw InvalidArgument("theoretical parameters need T, n >= 1");

  HyperParams p = base;
  p.schedule = Schedule::kConstant;
  switch (kind) {
    case AlgorithmKind::kEF21SGDM: {
      const double a = Require(in.alpha, "alpha", kind);
      p.batch_init = CeilBatch(s2 / (L * d0));
      if (in.n == 1) {
        p.eta = std::min(1.0, Ratio(L * d0, s2 * T, 0.5));
        p.gamma = std::min(a / (20.0 * L), p.eta / (7.0 * L));
      } else {
        const double b_init = static_cast<double>(p.batch_init);
        p.eta = std::min({1.0, Ratio(L * d0 * a * a, s2 * T, 0.25),
                          Ratio(L * d0 * a, s2 * T, 1.0 / 3.0), Ratio(L * d0 * n, s2 * T, 0.5),
                          in.sigma == 0.0 ? kInf : a * std::sqrt(L * d0 * b_init) / in.sigma});
        p.gamma = std::min(a / (20.0 * Lt), p.eta / (7.0 * L));
      }
      break;
    }
    case AlgorithmKind::kEF21SGD2M: {
      const double a = Require(in.alpha, "alpha", kind);
      p.batch_init = CeilBatch(s2 / (L * d0));
      const double b_init = static_cast<double>(p.batch_init);
      p.eta = std::min({1.0, Ratio(L * d0 * a * a, s2 * T, 0.25), Ratio(L * d0 * n, s2 * T, 0.5),
                        in.sigma == 0.0 ? kInf : a * std::sqrt(L * d0 * b_init) / in.sigma});
      p.gamma = std::min(a / (60.0 * Lt), p.eta / (16.0 * L));
      break;
    }
    case AlgorithmKind::kEF21SGDM_ABS: {
      const double delta = Require(in.delta, "Delta", kind);
      p.eta = std::min({1.0, Ratio(L * L * L * d0, delta * delta * T, 1.0 / 3.0),
                        Ratio(L * d0 * n, s2 * T, 0.5)});
      p.gamma = p.eta / (4.0 * L);
      p.batch_init = CeilBatch(s2 / (L * d0 * n));
      break;
    }
    case AlgorithmKind::kEF21STORM: {
      const double a = Require(in.alpha, "alpha", kind);
      const double ell = Require(in.smoothness.ell_tilde, "ell_tilde", kind);
      const double sn = std::sqrt(n);
      p.eta = std::min({a, Ratio(ell * d0 * a * a, s2 * sn * T, 2.0 / 7.0),
                        Ratio(ell * d0 * a, s2 * sn * T, 2.0 / 5.0),
                        Ratio(ell * d0 * sn, s2 * T, 2.0 / 3.0)});
      p.gamma = std::min({a / (8.0 * Lt), std::sqrt(a) / (6.0 * ell),
                          std::sqrt(n * p.eta) / (8.0 * ell)});
      p.batch_init = CeilBatch(std::max(s2 / (L * d0 * n), a * n / T));
      break;
    }
    case AlgorithmKind::kSGDM: {
      p.gamma = 1.0 / (3.0 * L);
      p.eta = 1.0;
      p.schedule = Schedule::kInvSqrtT;
      break;
    }
    default:
      throw InvalidArgument("no theoretical parameters for " + AlgorithmName(kind));
  }
  p.rounds = in.T;
  return p;
}

}  // namespace efsim
