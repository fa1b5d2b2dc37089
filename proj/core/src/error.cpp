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

#include "efsim/error.hpp"

namespace efsim {

DimensionMismatch::DimensionMismatch(std::size_t expected, std::size_t actual,
                                     const std::string& where)
    : Error(where + ": dimension mismatch (expected " +
            std::to_string(expected) + ", got " + std::to_string(actual) +
            ")"),
      expected_(expected),
      actual_(actual) {}

NumericFailure::NumericFailure(const std::string& what, std::int64_t round)
    : Error(round >= 0 ? what + " (round " + std::to_string(round) + ")"
                       : what),
      round_(round) {}

ParseError::ParseError(const std::string& what, std::size_t line)
    : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
      line_(line) {}

}  // namespace efsim
