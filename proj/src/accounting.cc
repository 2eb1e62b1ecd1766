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

#include "props/accounting.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "props/data.h"

namespace props::accounting {

namespace {

void check_epsilon(double epsilon) {
  if (!std::isfinite(epsilon) || epsilon < 0.0) {
    throw std::invalid_argument("epsilon must be finite and nonnegative");
  }
}

void check_k(int k) {
  if (k < 1) {
    throw std::invalid_argument("k must be a positive integer");
  }
}

}  // namespace

double basic_composition(double epsilon, int k) {
  check_epsilon(epsilon);
  check_k(k);
  return static_cast<double>(k) * epsilon;
}

ComposedBudget advanced_composition(double epsilon, int k,
                                    double delta_prime) {
  check_epsilon(epsilon);
  check_k(k);
  if (!(delta_prime > 0.0 && delta_prime < 1.0)) {
    throw std::invalid_argument(
        "advanced_composition: delta_prime must lie in (0, 1)");
  }
  const double kd = static_cast<double>(k);
  const double epsilon_labeler =
      kd * epsilon * epsilon +
      epsilon * std::sqrt(2.0 * kd * std::log(1.0 / delta_prime));
  return ComposedBudget{epsilon_labeler, delta_prime};
}

double dpsgd_noise_scale(double epsilon, double delta) {
  if (!std::isfinite(epsilon) || epsilon <= 0.0) {
    throw std::invalid_argument(
        "dpsgd_noise_scale: epsilon must be finite and positive");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument(
        "dpsgd_noise_scale: delta must lie in (0, 1)");
  }
  return std::sqrt(2.0 * std::log(1.25 / delta)) / epsilon;
}

GaussianMechanismParams GaussianMechanismParams::from_budget(
    double epsilon, double delta, double clip_threshold) {
  if (!(clip_threshold > 0.0)) {
    throw std::invalid_argument(
        "GaussianMechanismParams: clip threshold must be positive");
  }
  return GaussianMechanismParams{epsilon, delta, clip_threshold,
                                 dpsgd_noise_scale(epsilon, delta)};
}

GaussianMechanismParams GaussianMechanismParams::disabled() {
  return GaussianMechanismParams{std::numeric_limits<double>::infinity(), 0.0,
                                 std::numeric_limits<double>::infinity(), 0.0};
}

std::int64_t max_labeler_contribution(const data::PreferenceDataset& dataset) {
  if (dataset.samples.empty()) {
    throw std::invalid_argument("max_labeler_contribution: empty dataset");
  }
  std::unordered_map<std::int64_t, std::int64_t> counts;
  for (const auto& sample : dataset.samples) {
    if (sample.labeler_id() < 0) {
      throw std::invalid_argument(
          "max_labeler_contribution: sample is missing a labeler id");
    }
    ++counts[sample.labeler_id()];
  }
  std::int64_t max_count = 0;
  for (const auto& [id, count] : counts) {
    max_count = std::max(max_count, count);
  }
  return max_count;
}

}  // namespace props::accounting
