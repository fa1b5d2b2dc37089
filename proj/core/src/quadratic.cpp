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

#include "efsim/quadratic.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "efsim/error.hpp"

namespace efsim {

std::size_t QuadMatrix::dim() const {
  if (tri) return tri->dim;
  if (dense) return dense->dim();
  return 0;
}

DenseVector QuadMatrix::Apply(const DenseVector& x) const {
  if (tri) return tri->Apply(x);
  if (dense) return dense->Apply(x);
  throw InvalidArgument("empty quadratic matrix");
}

DenseMatrix QuadMatrix::ToDense() const {
  if (tri) return tri->ToDense();
  if (dense) return *dense;
  throw InvalidArgument("empty quadratic matrix");
}

bool QuadraticTask::is_tridiagonal() const {
  for (const auto& m : q) {
    if (!m.tri) return false;
  }
  return !q.empty();
}

void QuadraticTask::Validate() const {
  if (q.empty()) throw InvalidArgument("quadratic task has no nodes");
  if (b.size() != q.size()) throw InvalidArgument("quadratic task: |b| != |Q|");
  const std::size_t d = x0.dim();
  if (d == 0) throw InvalidArgument("quadratic task: empty x0");
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i].dim() != d) throw DimensionMismatch(d, q[i].dim(), "quadratic Q_i");
    if (b[i].dim() != d) throw DimensionMismatch(d, b[i].dim(), "quadratic b_i");
    if (q[i].dense && !q[i].dense->IsSymmetric(0.0)) {
      throw InvalidArgument("quadratic task: Q_" + std::to_string(i) +
                            " is not symmetric");
    }
  }
}

QuadraticTask GenerateQuadratic(std::size_t n, std::size_t d, double lambda,
                                double s, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("GenerateQuadratic: n must be >= 1");
  if (d < 2) throw InvalidArgument("GenerateQuadratic: d must be >= 2");
  if (!(lambda >= 0.0)) throw InvalidArgument("GenerateQuadratic: lambda < 0");
  if (!(s >= 0.0)) throw InvalidArgument("GenerateQuadratic: s < 0");

  RngStream rng(seed, 0, 0, StreamPurpose::kAuxiliary);
  QuadraticTask task;
  task.lambda = lambda;
  task.scale = s;
  task.seed = seed;
  std::vector<double> mu_s(n);
  double mean_quarter_mu = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xi_s = rng.NextGaussian();
    const double xi_b = rng.NextGaussian();
    mu_s[i] = 1.0 + s * xi_s;
    const double mu_b = s * xi_b;
    DenseVector b(d);
    b[0] = (mu_s[i] / 4.0) * (-1.0 + mu_b);
    task.b.push_back(std::move(b));
    mean_quarter_mu += mu_s[i] / 4.0;
  }
  mean_quarter_mu /= static_cast<double>(n);
  const ConstTridiagonal mean_unshifted{d, 2.0 * mean_quarter_mu, -mean_quarter_mu};
  const double shift = lambda - mean_unshifted.MinEigenvalue();
  for (std::size_t i = 0; i < n; ++i) {
    const double a = mu_s[i] / 4.0;
    QuadMatrix m;
    m.tri = ConstTridiagonal{d, 2.0 * a + shift, -a};
    task.q.push_back(std::move(m));
  }
  task.x0 = DenseVector(d);
  task.x0[0] = std::sqrt(static_cast<double>(d));
  return task;
}

namespace {

std::string Fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void WriteVector(std::ostream& out, const char* tag, const DenseVector& v) {
  out << tag;
  for (double x : v) out << ' ' << Fmt(x);
  out << '\n';
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-empty, non-comment line split on whitespace.
  std::vector<std::string> Next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      std::istringstream ss(line);
      std::vector<std::string> tokens;
      std::string tok;
      while (ss >> tok) tokens.push_back(tok);
      if (!tokens.empty()) return tokens;
    }
    throw ParseError("unexpected end of quadratic task file", line_no_);
  }

  std::vector<std::string> Expect(const std::string& tag, std::size_t min_args) {
    auto t = Next();
    if (t[0] != tag) {
      throw ParseError("expected '" + tag + "', found '" + t[0] + "'", line_no_);
    }
    if (t.size() - 1 < min_args) {
      throw ParseError("'" + tag + "' needs " + std::to_string(min_args) +
                           " values",
                       line_no_);
    }
    return t;
  }

  double ToDouble(const std::string& s) const {
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ParseError("not a number: '" + s + "'", line_no_);
    }
  }

  std::uint64_t ToUint(const std::string& s) const {
    try {
      std::size_t pos = 0;
      const auto v = std::stoull(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ParseError("not an unsigned integer: '" + s + "'", line_no_);
    }
  }

  DenseVector Vector(const std::string& tag, std::size_t d) {
    auto t = Expect(tag, d);
    if (t.size() - 1 != d) {
      throw ParseError("'" + tag + "' expects " + std::to_string(d) + " values",
                       line_no_);
    }
    DenseVector v(d);
    for (std::size_t j = 0; j < d; ++j) v[j] = ToDouble(t[j + 1]);
    return v;
  }

  std::size_t line() const { return line_no_; }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

}  // namespace

void SaveQuadraticTask(const QuadraticTask& task, const std::string& path) {
  task.Validate();
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw Error("cannot open '" + tmp + "' for writing");
    out << "efsim-quadratic 1\n";
    out << "nodes " << task.nodes() << '\n';
    out << "dim " << task.dim() << '\n';
    out << "lambda " << Fmt(task.lambda) << '\n';
    out << "scale " << Fmt(task.scale) << '\n';
    out << "seed " << task.seed << '\n';
    WriteVector(out, "x0", task.x0);
    for (std::size_t i = 0; i < task.nodes(); ++i) {
      out << "node " << i << '\n';
      WriteVector(out, "b", task.b[i]);
      const auto& m = task.q[i];
      if (m.tri) {
        out << "tridiagonal " << Fmt(m.tri->diag) << ' ' << Fmt(m.tri->off) << '\n';
      } else {
        out << "dense\n";
        for (std::size_t r = 0; r < task.dim(); ++r) {
          out << "row";
          for (std::size_t c = 0; c < task.dim(); ++c) out << ' ' << Fmt((*m.dense)(r, c));
          out << '\n';
        }
      }
    }
    if (!out) throw Error("write to '" + tmp + "' failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw Error("cannot rename '" + tmp + "' to '" + path + "'");
  }
}

QuadraticTask LoadQuadraticTask(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open quadratic task file '" + path + "'");
  LineReader r(in);
  auto header = r.Expect("efsim-quadratic", 1);
  if (header[1] != "1") throw ParseError("unsupported task file version", r.line());
  QuadraticTask task;
  const std::size_t n = r.ToUint(r.Expect("nodes", 1)[1]);
  const std::size_t d = r.ToUint(r.Expect("dim", 1)[1]);
  if (n == 0 || d == 0) throw ParseError("nodes and dim must be positive", r.line());
  task.lambda = r.ToDouble(r.Expect("lambda", 1)[1]);
  task.scale = r.ToDouble(r.Expect("scale", 1)[1]);
  task.seed = r.ToUint(r.Expect("seed", 1)[1]);
  task.x0 = r.Vector("x0", d);
  for (std::size_t i = 0; i < n; ++i) {
    if (r.ToUint(r.Expect("node", 1)[1]) != i) {
      throw ParseError("node records out of order", r.line());
    }
    task.b.push_back(r.Vector("b", d));
    auto kind = r.Next();
    QuadMatrix m;
    if (kind[0] == "tridiagonal") {
      if (kind.size() != 3) throw ParseError("tridiagonal expects diag and off", r.line());
      m.tri = ConstTridiagonal{d, r.ToDouble(kind[1]), r.ToDouble(kind[2])};
    } else if (kind[0] == "dense") {
      DenseMatrix a(d);
      for (std::size_t row = 0; row < d; ++row) {
        DenseVector v = r.Vector("row", d);
        for (std::size_t c = 0; c < d; ++c) a(row, c) = v[c];
      }
      m.dense = std::move(a);
    } else {
      throw ParseError("unknown matrix kind '" + kind[0] + "'", r.line());
    }
    task.q.push_back(std::move(m));
  }
  task.Validate();
  return task;
}

double QuadSpectralNorm(const QuadMatrix& m) {
  if (m.tri) return m.tri->SpectralNorm();
  const DenseMatrix& a = *m.dense;
  return PowerIterationSpectralNorm([&a](const DenseVector& x) { return a.Apply(x); },
                                    a.dim(), 1e-8)
      .value;
}

double QuadMinEigenvalue(const QuadMatrix& m) {
  if (m.tri) return m.tri->MinEigenvalue();
  const DenseMatrix& a = *m.dense;
  return PowerIterationMinEigenvalue([&a](const DenseVector& x) { return a.Apply(x); },
                                     a.dim(), 1e-12)
      .value;
}

QuadraticProblem::QuadraticProblem(QuadraticTask task, double sigma)
    : task_(std::move(task)), sigma_(sigma) {
  task_.Validate();
  if (!(sigma_ >= 0.0) || !std::isfinite(sigma_)) {
    throw InvalidArgument("quadratic noise sigma must be finite and >= 0");
  }
  const std::size_t n = task_.nodes();
  const std::size_t d = task_.dim();
  const double inv_n = 1.0 / static_cast<double>(n);
  mean_b_ = DenseVector(d);
  for (const auto& b : task_.b) mean_b_ += b;
  mean_b_ *= inv_n;
  if (task_.is_tridiagonal()) {
    double diag = 0.0;
    double off = 0.0;
    for (const auto& m : task_.q) {
      diag += m.tri->diag;
      off += m.tri->off;
    }
    mean_q_.tri = ConstTridiagonal{d, diag * inv_n, off * inv_n};
  } else {
    DenseMatrix mean(d);
    for (const auto& m : task_.q) {
      const DenseMatrix a = m.ToDense();
      for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) mean(r, c) += a(r, c);
      }
    }
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = 0; c < d; ++c) mean(r, c) *= inv_n;
    }
    mean_q_.dense = std::move(mean);
  }
  mean_min_eig_ = QuadMinEigenvalue(mean_q_);

  smoothness_.L = QuadSpectralNorm(mean_q_);
  for (const auto& m : task_.q) smoothness_.L_i.push_back(QuadSpectralNorm(m));
  smoothness_.FinalizeTilde();
  // Additive noise leaves per-sample gradients as smooth as f_i.
  smoothness_.ell_tilde = smoothness_.L_tilde;
  if (mean_min_eig_ > 0.0) {
    x_star_ = mean_q_.tri ? mean_q_.tri->Solve(mean_b_)
                          : SolveDense(*mean_q_.dense, mean_b_);
    smoothness_.f_star = Value(x_star_);
  }
}

double QuadraticProblem::NodeValue(std::size_t i, const DenseVector& x) const {
  CheckNode(i);
  CheckPoint(x);
  return 0.5 * Dot(x, task_.q[i].Apply(x)) - Dot(x, task_.b[i]);
}

DenseVector QuadraticProblem::NodeGradient(std::size_t i, const DenseVector& x) const {
  CheckNode(i);
  CheckPoint(x);
  DenseVector g = task_.q[i].Apply(x);
  g -= task_.b[i];
  return g;
}

double QuadraticProblem::Value(const DenseVector& x) const {
  CheckPoint(x);
  return 0.5 * Dot(x, mean_q_.Apply(x)) - Dot(x, mean_b_);
}

DenseVector QuadraticProblem::Gradient(const DenseVector& x) const {
  CheckPoint(x);
  DenseVector g = mean_q_.Apply(x);
  g -= mean_b_;
  return g;
}

Sample QuadraticProblem::DrawSample(std::size_t i, std::size_t batch,
                                    RngStream& rng) const {
  CheckNode(i);
  if (batch < 1) throw InvalidArgument("batch size must be >= 1");
  Sample s;
  s.batch = batch;
  if (sigma_ == 0.0) return s;
  const std::size_t d = dim();
  const double coord_sd = sigma_ / std::sqrt(static_cast<double>(d));
  s.noise = DenseVector(d);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t j = 0; j < d; ++j) s.noise[j] += coord_sd * rng.NextGaussian();
  }
  if (batch > 1) s.noise *= 1.0 / static_cast<double>(batch);
  return s;
}

DenseVector QuadraticProblem::StochasticGradient(std::size_t i, const DenseVector& x,
                                                 const Sample& sample) const {
  DenseVector g = NodeGradient(i, x);
  if (!sample.noise.empty()) g += sample.noise;
  return g;
}

}  // namespace efsim
