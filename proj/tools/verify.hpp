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
#include <string>
#include <vector>

namespace efsim::cli {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

bool AllPass(const std::vector<CheckResult>& checks);

/// compressors, reductions, theorem1, lyapunov, storm.
std::vector<std::string> VerifySuiteNames();

/// Runs one named suite with fixed seeds. Throws InvalidArgument on an
/// unknown name.
std::vector<CheckResult> RunVerifySuite(const std::string& suite, std::size_t workers = 1);

/// TopK(10, 100) worst case, RandK(10, 100) mean ratio and HardThreshold
/// error bound over 1e4 Gaussian draws.
std::vector<CheckResult> VerifyCompressors();

/// Bitwise eta = 1 equivalences, the sigma = 0 Identity collapse onto
/// gradient descent, the EF14 virtual iterate and aggregate drift, each over
/// 100 rounds.
std::vector<CheckResult> VerifyReductions();

/// Lower bound for EF21SGD_IDEAL on the counterexample (50 seeds, T = 1e4)
/// with a three standard error margin.
std::vector<CheckResult> VerifyTheorem1(std::size_t workers = 1);

/// Lyapunov descent of EF21SGDM with theoretical parameters on a generated
/// quadratic (n = 20, d = 100), deterministic and 20-seed stochastic.
std::vector<CheckResult> VerifyLyapunov(std::size_t workers = 1);

/// One-step conditional mean of the STORM estimator over 1e4 fresh draws.
std::vector<CheckResult> VerifyStorm();

}  // namespace efsim::cli
