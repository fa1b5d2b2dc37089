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
#include <stdexcept>
#include <string>

namespace efsim {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand dimensions disagree.
class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t actual,
                    const std::string& where);
  std::size_t expected() const { return expected_; }
  std::size_t actual() const { return actual_; }

 private:
  std::size_t expected_;
  std::size_t actual_;
};

/// A NaN or Inf appeared in an iterate or estimator. `round` is the
/// optimisation round that produced it (or -1 outside a run).
class NumericFailure : public Error {
 public:
  NumericFailure(const std::string& what, std::int64_t round);
  std::int64_t round() const { return round_; }

 private:
  std::int64_t round_;
};

/// Malformed textual input; `line` is 1-based (0 when unknown).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Invalid combination of parameters or an unsatisfied precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace efsim
