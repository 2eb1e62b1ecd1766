// Copyright 2026 The PROPS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace props {

// Thrown when an optimizer produced a non-finite parameter or gradient.
class TrainingDivergedError : public std::runtime_error {
 public:
  TrainingDivergedError(std::int64_t step_index, const std::string& what)
      : std::runtime_error("training diverged at step " +
                           std::to_string(step_index) + ": " + what),
        step_index_(step_index) {}

  std::int64_t step_index() const { return step_index_; }

 private:
  std::int64_t step_index_;
};

// Thrown on malformed, truncated, or inconsistent dataset files. line() is
// 1-based; 0 means the failure was not tied to a specific line.
class DatasetIoError : public std::runtime_error {
 public:
  DatasetIoError(std::int64_t line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                    : what),
        line_(line) {}

  std::int64_t line() const { return line_; }

 private:
  std::int64_t line_;
};

// Thrown when the model-error estimator has no defined value (gamma_eps at
// or above 1/2, i.e. the epsilon = 0 case).
class EstimatorUndefinedError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace props
